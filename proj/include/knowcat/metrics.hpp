#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "knowcat/category.hpp"
#include "knowcat/classifier.hpp"

namespace knowcat {

// Fraction of results whose greedy answer was correct.
double accuracy(const std::vector<ClassificationResult>& results);

struct CategoryDistribution {
  std::array<std::size_t, kNumCategories> counts{};
  std::array<double, kNumCategories> ratios{};
  std::size_t total = 0;

  double ratio(Category c) const { return ratios[slot_of(c)]; }

  // Builds a distribution directly from ratios (no record counts).
  static CategoryDistribution from_ratios(
      const std::array<double, kNumCategories>& ratios);
};

CategoryDistribution category_distribution(
    const std::vector<ClassificationResult>& results);

// Weight of category i is 7 - i: 6 for 1.HK down to 1 for 6.CU.
constexpr int category_weight(Category c) { return 7 - index_of(c); }

// Weighted sum of ratios, accumulated in fixed category order.
double category_score(const CategoryDistribution& distribution);

// One row of a logit-lens export.
struct LayerExportRecord {
  std::string question_id;
  int layer = 0;
  double p_truth = 0.0;
  std::string model_id;
  std::string prompt_fingerprint;
};

// Throws ParseError on schema violations, naming the line.
std::vector<LayerExportRecord> read_layer_export(
    std::istream& in, std::string_view source = "<export>");
std::vector<LayerExportRecord> load_layer_export(const std::string& path);

// Mean gold-answer probability per (layer, category).
struct LayerHeatmap {
  int layer_count = 0;  // layers 0 .. layer_count - 1
  std::vector<std::array<std::optional<double>, kNumCategories>> cells;
  std::vector<std::array<std::size_t, kNumCategories>> support;

  std::optional<double> cell(int layer, Category c) const {
    return cells.at(static_cast<std::size_t>(layer))[slot_of(c)];
  }
};

// Throws Error for an unknown question id, non-contiguous layers or
// questions with differing layer counts.
LayerHeatmap layer_heatmap(const std::vector<LayerExportRecord>& records,
                           const std::vector<ClassificationResult>& results);

}  // namespace knowcat
