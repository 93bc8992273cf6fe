#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "termrank/label.hpp"

namespace termrank {

struct FoldPlan {
  std::size_t k = 5;
  std::vector<std::size_t> assignment;  // fold index per example

  std::vector<std::size_t> test_rows(std::size_t fold) const;
  std::vector<std::size_t> train_rows(std::size_t fold) const;
};

// Each class is shuffled with the seeded generator and dealt round-robin
// into k folds; the deal continues across classes so fold sizes differ by
// at most one. Needs k >= 2 and at least k examples of each class
// (TooFewExamples otherwise).
FoldPlan stratified_folds(std::span<const Label> labels, std::size_t k,
                          std::uint64_t seed);

}  // namespace termrank
