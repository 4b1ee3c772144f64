#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crowdrank/types.hpp"

namespace crowdrank {

struct RankerWeights {
  std::vector<double> w;
  std::size_t trained_iterations = 0;
  double final_cost = 0.0;
  // Set when a gradient step could not decrease the cost after 20 halvings.
  bool step_search_failed = false;
};

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t max_iterations = 500;
  double cost_tolerance = 1e-6;
  double l2_penalty = 0.0;
  std::uint64_t seed = 0;  // reserved; full-batch descent draws no randomness
};

struct HingeValue {
  double loss;
  double derivative;
};

// Rennie's smooth hinge: 0 for m >= 1, (1-m)^2/2 for 0 < m < 1, 0.5 - m
// for m <= 0. Continuously differentiable.
HingeValue smooth_hinge(double margin);

// Sum over pairs of weight_pos*h(<w,d>) + weight_neg*h(-<w,d>) plus an
// optional L2 term (l2/2)*|w|^2.
double weighted_pair_cost(const std::vector<double>& w, const Matrix& diffs,
                          const std::vector<double>& weight_pos,
                          const std::vector<double>& weight_neg,
                          double l2_penalty);

// Same cost; also fills grad (resized to w's dimension).
double weighted_pair_cost_grad(const std::vector<double>& w, const Matrix& diffs,
                               const std::vector<double>& weight_pos,
                               const std::vector<double>& weight_neg,
                               double l2_penalty, std::vector<double>& grad);

// Full-batch gradient descent with per-iteration backtracking halving.
// Stops when the cost change drops below cost_tolerance or max_iterations
// is reached. init defaults to the zero vector.
RankerWeights train_ranker(const Matrix& diffs,
                           const std::vector<double>& weight_pos,
                           const std::vector<double>& weight_neg,
                           const TrainConfig& config,
                           const RankerWeights* init = nullptr);

double score(const RankerWeights& weights, std::span<const double> x);

}  // namespace crowdrank
