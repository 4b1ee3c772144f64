#pragma once

#include <optional>
#include <span>
#include <vector>

#include "crowdrank/types.hpp"

namespace crowdrank {

// All unordered pairs (i, j) with i < j in lexicographic order. When scores
// are supplied, pairs with tied scores are omitted.
PairIndex build_pair_index(const ItemTable& items,
                           const std::vector<double>* ground_scores = nullptr);

// Bit 1 at (i,j) iff score_i > score_j. Tied pairs are an error.
LabelColumn ground_truth_labels(const PairIndex& pairs,
                                const std::vector<double>& scores);

std::vector<double> difference_vector(std::span<const double> xi,
                                      std::span<const double> xj);

// Row p holds x_i - x_j for pair p.
Matrix pair_differences(const ItemTable& items, const PairIndex& pairs);

struct StandardizeResult {
  ItemTable items;
  std::vector<double> mean;
  std::vector<double> scale;                 // sample (n-1) std, 1 for constant dims
  std::vector<std::uint8_t> constant_dims;   // flags, one per dimension
};

// Centers each dimension and divides by its sample standard deviation.
// Constant dimensions become zeros and are flagged.
StandardizeResult standardize_features(const ItemTable& items);

}  // namespace crowdrank
