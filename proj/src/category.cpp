#include "knowcat/category.hpp"

#include <string>

namespace knowcat {
namespace {

struct CategoryInfo {
  std::string_view code;
  std::string_view label;
  std::string_view name;
  std::string_view color;
};

constexpr std::array<CategoryInfo, kNumCategories> kInfo = {{
    {"HK", "1.HK", "Highly Known", "#4B74B2"},
    {"MK", "2.MK", "Maybe Known", "#8CBEE0"},
    {"WK", "3.WK", "Weakly Known", "#E6F1F3"},
    {"UU", "4.UU", "Unconfident Unknown", "#FFDF92"},
    {"MU", "5.MU", "May Confident Unknown", "#FC8C5A"},
    {"CU", "6.CU", "Confident Unknown", "#DB3124"},
}};

}  // namespace

std::string_view code_of(Category c) { return kInfo[slot_of(c)].code; }
std::string_view label_of(Category c) { return kInfo[slot_of(c)].label; }
std::string_view full_name_of(Category c) { return kInfo[slot_of(c)].name; }
std::string_view color_of(Category c) { return kInfo[slot_of(c)].color; }

std::optional<Category> parse_category(std::string_view text) {
  for (std::size_t i = 0; i < kNumCategories; ++i) {
    const auto& info = kInfo[i];
    if (text == info.code || text == info.label ||
        text == std::to_string(i + 1)) {
      return kAllCategories[i];
    }
  }
  return std::nullopt;
}

}  // namespace knowcat
