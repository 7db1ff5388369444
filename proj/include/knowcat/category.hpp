#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace knowcat {

// The six knowledge categories, ordered from best to worst comprehension.
// The numeric value is the 1-based display index.
enum class Category : int {
  kHighlyKnown = 1,
  kMaybeKnown = 2,
  kWeaklyKnown = 3,
  kUnconfidentUnknown = 4,
  kMayConfidentUnknown = 5,
  kConfidentUnknown = 6,
};

inline constexpr std::size_t kNumCategories = 6;

inline constexpr std::array<Category, kNumCategories> kAllCategories = {
    Category::kHighlyKnown,        Category::kMaybeKnown,
    Category::kWeaklyKnown,        Category::kUnconfidentUnknown,
    Category::kMayConfidentUnknown, Category::kConfidentUnknown,
};

constexpr int index_of(Category c) { return static_cast<int>(c); }

// 0-based slot for array indexing.
constexpr std::size_t slot_of(Category c) {
  return static_cast<std::size_t>(index_of(c) - 1);
}

constexpr Category category_at_slot(std::size_t slot) {
  return kAllCategories[slot];
}

// "better" means strictly lower index.
constexpr bool is_better(Category a, Category b) {
  return index_of(a) < index_of(b);
}

constexpr bool is_known(Category c) { return index_of(c) <= 3; }

// Short code ("HK") and the display label ("1.HK").
std::string_view code_of(Category c);
std::string_view label_of(Category c);
std::string_view full_name_of(Category c);
// Plot color as "#RRGGBB".
std::string_view color_of(Category c);

// Accepts "HK", "1.HK" or "1".
std::optional<Category> parse_category(std::string_view text);

}  // namespace knowcat
