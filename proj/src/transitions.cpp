#include "knowcat/transitions.hpp"

#include <unordered_map>

#include "knowcat/error.hpp"

namespace knowcat {
namespace {

struct MoveCounts {
  std::size_t up = 0;
  std::size_t down = 0;
  std::size_t same = 0;

  std::size_t total() const { return up + down + same; }

  TransitionRatios ratios() const {
    const auto n = static_cast<double>(total());
    return {static_cast<double>(up) / n, static_cast<double>(down) / n,
            static_cast<double>(same) / n};
  }
};

MoveCounts row_moves(const TransitionMatrix& m, std::size_t from) {
  MoveCounts mc;
  for (std::size_t to = 0; to < kNumCategories; ++to) {
    const auto n = m.counts[from][to];
    if (to < from) {
      mc.up += n;
    } else if (to > from) {
      mc.down += n;
    } else {
      mc.same += n;
    }
  }
  return mc;
}

}  // namespace

TransitionMatrix TransitionMatrix::transposed() const {
  TransitionMatrix t;
  for (std::size_t i = 0; i < kNumCategories; ++i) {
    for (std::size_t j = 0; j < kNumCategories; ++j) t.counts[j][i] = counts[i][j];
  }
  t.total = total;
  t.only_in_base = only_in_target;
  t.only_in_target = only_in_base;
  return t;
}

TransitionMatrix transition_matrix(const std::vector<ClassificationResult>& base,
                                   const std::vector<ClassificationResult>& target) {
  std::unordered_map<std::string, Category> target_by_id;
  target_by_id.reserve(target.size());
  for (const auto& r : target) target_by_id.emplace(r.record_id, r.category);

  TransitionMatrix m;
  std::unordered_map<std::string, bool> base_ids;
  base_ids.reserve(base.size());
  for (const auto& r : base) {
    base_ids.emplace(r.record_id, true);
    auto it = target_by_id.find(r.record_id);
    if (it == target_by_id.end()) {
      m.only_in_base.push_back(r.record_id);
      continue;
    }
    ++m.counts[slot_of(r.category)][slot_of(it->second)];
    ++m.total;
  }
  for (const auto& r : target) {
    if (!base_ids.contains(r.record_id)) m.only_in_target.push_back(r.record_id);
  }
  if (m.total == 0) throw Error("the two snapshots share no records");
  return m;
}

TransitionRatios transition_ratios(const TransitionMatrix& matrix) {
  if (matrix.total == 0) throw Error("transition ratios of an empty matrix");
  MoveCounts all;
  for (std::size_t from = 0; from < kNumCategories; ++from) {
    const auto row = row_moves(matrix, from);
    all.up += row.up;
    all.down += row.down;
    all.same += row.same;
  }
  return all.ratios();
}

std::array<std::optional<TransitionRatios>, kNumCategories> per_category_ratios(
    const TransitionMatrix& matrix) {
  if (matrix.total == 0) throw Error("transition ratios of an empty matrix");
  std::array<std::optional<TransitionRatios>, kNumCategories> out;
  for (std::size_t from = 0; from < kNumCategories; ++from) {
    const auto row = row_moves(matrix, from);
    if (row.total() > 0) out[from] = row.ratios();
  }
  return out;
}

}  // namespace knowcat
