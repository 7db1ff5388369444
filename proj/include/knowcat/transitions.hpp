#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "knowcat/category.hpp"
#include "knowcat/classifier.hpp"

namespace knowcat {

struct TransitionMatrix {
  // counts[source slot][target slot]
  std::array<std::array<std::size_t, kNumCategories>, kNumCategories> counts{};
  std::size_t total = 0;
  std::vector<std::string> only_in_base;
  std::vector<std::string> only_in_target;

  std::size_t at(Category from, Category to) const {
    return counts[slot_of(from)][slot_of(to)];
  }
  TransitionMatrix transposed() const;
};

struct TransitionRatios {
  double upgrade = 0.0;
  double downgrade = 0.0;
  double stable = 0.0;
};

// Pairs results by record id. Records present on one side only are listed
// in the skip lists. Throws Error when no record is common to both.
TransitionMatrix transition_matrix(
    const std::vector<ClassificationResult>& base,
    const std::vector<ClassificationResult>& target);

TransitionRatios transition_ratios(const TransitionMatrix& matrix);

// Row-wise ratios; rows without records are empty.
std::array<std::optional<TransitionRatios>, kNumCategories>
per_category_ratios(const TransitionMatrix& matrix);

}  // namespace knowcat
