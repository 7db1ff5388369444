#include "knowcat/metrics.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "knowcat/error.hpp"

namespace knowcat {
namespace {

ClassificationResult result(std::string id, Category c) {
  ClassificationResult r;
  r.record_id = std::move(id);
  r.category = c;
  r.greedy_correct = index_of(c) <= 2;
  return r;
}

std::vector<ClassificationResult> results_with(std::initializer_list<std::pair<Category, int>> spec) {
  std::vector<ClassificationResult> out;
  for (const auto& [c, n] : spec) {
    for (int i = 0; i < n; ++i) out.push_back(result("r" + std::to_string(out.size()), c));
  }
  return out;
}

TEST(Accuracy, Examples) {
  EXPECT_DOUBLE_EQ(accuracy(results_with({{Category::kHighlyKnown, 4}})), 1.0);
  EXPECT_DOUBLE_EQ(accuracy(results_with({{Category::kHighlyKnown, 2},
                                          {Category::kMaybeKnown, 1},
                                          {Category::kWeaklyKnown, 1}})),
                   0.75);
  EXPECT_DOUBLE_EQ(accuracy(results_with({{Category::kConfidentUnknown, 3}})), 0.0);
  EXPECT_THROW(accuracy({}), Error);
}

TEST(Distribution, Examples) {
  const auto d = category_distribution(results_with({{Category::kHighlyKnown, 6},
                                                     {Category::kMaybeKnown, 4}}));
  EXPECT_EQ(d.total, 10u);
  EXPECT_DOUBLE_EQ(d.ratio(Category::kHighlyKnown), 0.6);
  EXPECT_DOUBLE_EQ(d.ratio(Category::kMaybeKnown), 0.4);
  for (std::size_t s = 2; s < kNumCategories; ++s) EXPECT_EQ(d.ratios[s], 0.0);

  std::vector<ClassificationResult> uniform;
  for (Category c : kAllCategories) uniform.push_back(result(std::string(code_of(c)), c));
  const auto u = category_distribution(uniform);
  for (double r : u.ratios) EXPECT_DOUBLE_EQ(r, 1.0 / 6.0);

  EXPECT_THROW(category_distribution({}), Error);
}

TEST(CategoryScore, Goldens) {
  EXPECT_NEAR(category_score(CategoryDistribution::from_ratios({0.6, 0.4, 0, 0, 0, 0})), 5.6, 1e-12);
  EXPECT_NEAR(category_score(CategoryDistribution::from_ratios({0, 0, 0, 0, 0, 1})), 1.0, 1e-12);
  const double sixth = 1.0 / 6.0;
  EXPECT_NEAR(category_score(CategoryDistribution::from_ratios({sixth, sixth, sixth, sixth, sixth, sixth})),
              3.5, 1e-12);
}

TEST(CategoryScore, Weights) {
  EXPECT_EQ(category_weight(Category::kHighlyKnown), 6);
  EXPECT_EQ(category_weight(Category::kConfidentUnknown), 1);
}

std::array<double, kNumCategories> random_simplex(std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::array<double, kNumCategories> r{};
  double sum = 0;
  for (auto& x : r) sum += (x = e(rng));
  for (auto& x : r) x /= sum;
  return r;
}

TEST(CategoryScore, BoundsAndMonotonicity) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    auto r = random_simplex(rng);
    const double s = category_score(CategoryDistribution::from_ratios(r));
    EXPECT_GE(s, 1.0 - 1e-12);
    EXPECT_LE(s, 6.0 + 1e-12);
    // Move mass from a worse category to a better one.
    const std::size_t from = 1 + rng() % 5;
    const std::size_t to = rng() % from;
    const double delta = r[from] * unit(rng);
    auto moved = r;
    moved[from] -= delta;
    moved[to] += delta;
    EXPECT_GE(category_score(CategoryDistribution::from_ratios(moved)), s - 1e-12);
  }
}

TEST(Distribution, RatiosFormSimplexAndAccuracyMatchesTopTwo) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ClassificationResult> rs;
    const std::size_t n = 1 + rng() % 200;
    std::size_t known = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Category c = category_at_slot(rng() % kNumCategories);
      known += index_of(c) <= 2;
      rs.push_back(result("r" + std::to_string(i), c));
    }
    const auto d = category_distribution(rs);
    double sum = 0;
    std::size_t count_sum = 0;
    for (std::size_t s = 0; s < kNumCategories; ++s) {
      EXPECT_GE(d.ratios[s], 0.0);
      EXPECT_LE(d.ratios[s], 1.0);
      sum += d.ratios[s];
      count_sum += d.counts[s];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_EQ(count_sum, n);
    EXPECT_EQ(d.counts[0] + d.counts[1], known);
    EXPECT_EQ(accuracy(rs), static_cast<double>(known) / static_cast<double>(n));
    EXPECT_NEAR(accuracy(rs), d.ratios[0] + d.ratios[1], 1e-15);
  }
}

LayerExportRecord layer_rec(std::string q, int layer, double p) {
  return {std::move(q), layer, p, "m", "fp"};
}

TEST(LayerHeatmap, SingleRecordAndAbsentCells) {
  const auto h = layer_heatmap({layer_rec("a", 0, 0.81)}, {result("a", Category::kHighlyKnown)});
  EXPECT_EQ(h.layer_count, 1);
  ASSERT_TRUE(h.cell(0, Category::kHighlyKnown));
  EXPECT_DOUBLE_EQ(*h.cell(0, Category::kHighlyKnown), 0.81);
  EXPECT_FALSE(h.cell(0, Category::kUnconfidentUnknown));
  EXPECT_EQ(h.support[0][slot_of(Category::kUnconfidentUnknown)], 0u);
}

TEST(LayerHeatmap, MeanPerCell) {
  const auto h = layer_heatmap(
      {layer_rec("a", 0, 0.1), layer_rec("a", 1, 0.2), layer_rec("b", 0, 0.5), layer_rec("b", 1, 0.4)},
      {result("a", Category::kWeaklyKnown), result("b", Category::kWeaklyKnown)});
  EXPECT_EQ(h.layer_count, 2);
  EXPECT_DOUBLE_EQ(*h.cell(0, Category::kWeaklyKnown), 0.3);
  EXPECT_DOUBLE_EQ(*h.cell(1, Category::kWeaklyKnown), 0.3);
  EXPECT_EQ(h.support[1][slot_of(Category::kWeaklyKnown)], 2u);
}

TEST(LayerHeatmap, Errors) {
  const std::vector<ClassificationResult> cls = {result("a", Category::kHighlyKnown),
                                                 result("b", Category::kHighlyKnown)};
  EXPECT_THROW(layer_heatmap({}, cls), Error);
  EXPECT_THROW(layer_heatmap({layer_rec("zzz", 0, 0.5)}, cls), Error);
  EXPECT_THROW(layer_heatmap({layer_rec("a", 0, 0.5), layer_rec("a", 0, 0.6)}, cls), Error);
  EXPECT_THROW(layer_heatmap({layer_rec("a", 0, 0.5), layer_rec("a", 2, 0.6)}, cls), Error);
  EXPECT_THROW(layer_heatmap({layer_rec("a", 0, 0.5), layer_rec("a", 1, 0.6), layer_rec("b", 0, 0.1)}, cls),
               Error);
}

TEST(LayerExport, SchemaValidation) {
  std::istringstream good(
      R"({"question_id":"q1","layer":0,"p_truth":0.5,"model_id":"m","prompt_fingerprint":"f"})" "\n");
  const auto recs = read_layer_export(good);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].question_id, "q1");

  const char* bad[] = {
      R"({"question_id":"q1","layer":0,"p_truth":1.5,"model_id":"m","prompt_fingerprint":"f"})",
      R"({"question_id":"q1","layer":-1,"p_truth":0.5,"model_id":"m","prompt_fingerprint":"f"})",
      R"({"question_id":"q1","p_truth":0.5,"model_id":"m","prompt_fingerprint":"f"})",
      R"({"question_id":"q1","layer":0,"p_truth":"x","model_id":"m","prompt_fingerprint":"f"})",
      R"(not json)",
  };
  for (const char* line : bad) {
    std::istringstream in(std::string("\n") + line + "\n");
    try {
      read_layer_export(in, "export.jsonl");
      ADD_FAILURE() << line;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), 2u) << line;
    }
  }
}

}  // namespace
}  // namespace knowcat
