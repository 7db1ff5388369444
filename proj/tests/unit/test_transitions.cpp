#include "knowcat/transitions.hpp"

#include <gtest/gtest.h>

#include <random>

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

// Builds base/target lists realising a given count matrix.
std::pair<std::vector<ClassificationResult>, std::vector<ClassificationResult>> from_counts(
    const std::array<std::array<std::size_t, 6>, 6>& counts) {
  std::vector<ClassificationResult> base, target;
  std::size_t id = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      for (std::size_t n = 0; n < counts[i][j]; ++n, ++id) {
        base.push_back(result("q" + std::to_string(id), category_at_slot(i)));
        target.push_back(result("q" + std::to_string(id), category_at_slot(j)));
      }
    }
  }
  return {base, target};
}

TEST(TransitionMatrix, IdenticalRunsAreDiagonal) {
  std::vector<ClassificationResult> rs;
  for (Category c : kAllCategories) rs.push_back(result(std::string(code_of(c)), c));
  const auto m = transition_matrix(rs, rs);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(m.counts[i][j], i == j ? 1u : 0u);
  }
  const auto r = transition_ratios(m);
  EXPECT_EQ(r.stable, 1.0);
  EXPECT_EQ(r.upgrade, 0.0);
  EXPECT_EQ(r.downgrade, 0.0);
}

TEST(TransitionMatrix, SingleMoves) {
  auto m = transition_matrix({result("x", Category::kWeaklyKnown)}, {result("x", Category::kMaybeKnown)});
  EXPECT_EQ(m.at(Category::kWeaklyKnown, Category::kMaybeKnown), 1u);
  EXPECT_EQ(m.counts[2][1], 1u);
  EXPECT_EQ(transition_ratios(m).upgrade, 1.0);

  m = transition_matrix({result("x", Category::kMaybeKnown)}, {result("x", Category::kUnconfidentUnknown)});
  EXPECT_EQ(m.counts[1][3], 1u);
  EXPECT_EQ(transition_ratios(m).downgrade, 1.0);
}

TEST(TransitionRatios, MixedExample) {
  std::array<std::array<std::size_t, 6>, 6> c{};
  c[2][0] = 5;  // WK -> HK
  c[0][3] = 1;  // HK -> UU
  c[4][4] = 4;  // MU -> MU
  const auto [b, t] = from_counts(c);
  const auto r = transition_ratios(transition_matrix(b, t));
  EXPECT_DOUBLE_EQ(r.upgrade, 0.5);
  EXPECT_DOUBLE_EQ(r.downgrade, 0.1);
  EXPECT_DOUBLE_EQ(r.stable, 0.4);
}

TEST(TransitionRatios, ConfidentUnknownToHighlyKnown) {
  std::array<std::array<std::size_t, 6>, 6> c{};
  c[5][0] = 3;
  const auto [b, t] = from_counts(c);
  const auto r = transition_ratios(transition_matrix(b, t));
  EXPECT_EQ(r.upgrade, 1.0);
  EXPECT_EQ(r.downgrade, 0.0);
  EXPECT_EQ(r.stable, 0.0);
}

TEST(PerCategoryRatios, RowsAndEmptyRows) {
  std::array<std::array<std::size_t, 6>, 6> c{};
  c[2][0] = 2;
  c[2][2] = 1;
  c[2][4] = 1;
  const auto [b, t] = from_counts(c);
  const auto rows = per_category_ratios(transition_matrix(b, t));
  ASSERT_TRUE(rows[2]);
  EXPECT_DOUBLE_EQ(rows[2]->upgrade, 0.5);
  EXPECT_DOUBLE_EQ(rows[2]->stable, 0.25);
  EXPECT_DOUBLE_EQ(rows[2]->downgrade, 0.25);
  for (std::size_t i : {0u, 1u, 3u, 4u, 5u}) EXPECT_FALSE(rows[i]) << i;
}

TEST(TransitionMatrix, IntersectionOnly) {
  const std::vector<ClassificationResult> base = {result("a", Category::kHighlyKnown),
                                                  result("b", Category::kMaybeKnown)};
  const std::vector<ClassificationResult> target = {result("b", Category::kHighlyKnown),
                                                    result("c", Category::kHighlyKnown)};
  const auto m = transition_matrix(base, target);
  EXPECT_EQ(m.total, 1u);
  EXPECT_EQ(m.only_in_base, std::vector<std::string>{"a"});
  EXPECT_EQ(m.only_in_target, std::vector<std::string>{"c"});
  EXPECT_THROW(transition_matrix({result("a", Category::kHighlyKnown)},
                                 {result("z", Category::kHighlyKnown)}),
               Error);
}

TEST(TransitionRatios, RandomMatrixProperties) {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 1000; ++trial) {
    std::array<std::array<std::size_t, 6>, 6> c{};
    std::size_t total = 0;
    for (auto& row : c) {
      for (auto& x : row) total += (x = rng() % 8);
    }
    if (total == 0) c[0][0] = total = 1;
    const auto [b, t] = from_counts(c);
    const auto m = transition_matrix(b, t);
    EXPECT_EQ(m.total, total);
    const auto r = transition_ratios(m);
    EXPECT_NEAR(r.upgrade + r.downgrade + r.stable, 1.0, 1e-12);
    EXPECT_GE(r.upgrade, 0.0);
    EXPECT_GE(r.downgrade, 0.0);
    EXPECT_GE(r.stable, 0.0);

    const auto rt = transition_ratios(m.transposed());
    EXPECT_EQ(rt.upgrade, r.downgrade);
    EXPECT_EQ(rt.downgrade, r.upgrade);
    EXPECT_EQ(rt.stable, r.stable);

    // Support-weighted row ratios aggregate to the overall ratios.
    const auto rows = per_category_ratios(m);
    double up = 0, down = 0, stable = 0;
    for (std::size_t i = 0; i < 6; ++i) {
      std::size_t support = 0;
      for (std::size_t j = 0; j < 6; ++j) support += m.counts[i][j];
      ASSERT_EQ(rows[i].has_value(), support > 0);
      if (!rows[i]) continue;
      const double w = static_cast<double>(support) / static_cast<double>(total);
      up += w * rows[i]->upgrade;
      down += w * rows[i]->downgrade;
      stable += w * rows[i]->stable;
    }
    EXPECT_NEAR(up, r.upgrade, 1e-12);
    EXPECT_NEAR(down, r.downgrade, 1e-12);
    EXPECT_NEAR(stable, r.stable, 1e-12);
  }
}

}  // namespace
}  // namespace knowcat
