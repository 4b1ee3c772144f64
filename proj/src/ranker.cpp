#include "crowdrank/ranker.hpp"

#include <cmath>

namespace crowdrank {

HingeValue smooth_hinge(double margin) {
  if (margin >= 1.0) return {0.0, 0.0};
  if (margin > 0.0) {
    const double gap = 1.0 - margin;
    return {0.5 * gap * gap, -gap};
  }
  return {0.5 - margin, -1.0};
}

namespace {

void check_weights(const Matrix& diffs, const std::vector<double>& weight_pos,
                   const std::vector<double>& weight_neg) {
  if (weight_pos.size() != diffs.rows() || weight_neg.size() != diffs.rows())
    throw InvalidInput("pair weight length does not match pair count");
  for (std::size_t p = 0; p < weight_pos.size(); ++p) {
    if (!std::isfinite(weight_pos[p]) || !std::isfinite(weight_neg[p]))
      throw InvalidInput("non-finite pair weight");
  }
}

double dot(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

double weighted_pair_cost(const std::vector<double>& w, const Matrix& diffs,
                          const std::vector<double>& weight_pos,
                          const std::vector<double>& weight_neg,
                          double l2_penalty) {
  check_weights(diffs, weight_pos, weight_neg);
  const std::size_t d = diffs.cols();
  double cost = 0.0;
  for (std::size_t p = 0; p < diffs.rows(); ++p) {
    const double m = dot(w.data(), diffs[p], d);
    // Accumulation mirrors weighted_pair_cost_grad exactly so the trainer's
    // accept test and its recorded costs agree bitwise.
    cost += weight_pos[p] * smooth_hinge(m).loss + weight_neg[p] * smooth_hinge(-m).loss;
  }
  if (l2_penalty != 0.0) {
    double norm2 = 0.0;
    for (double v : w) norm2 += v * v;
    cost += 0.5 * l2_penalty * norm2;
  }
  return cost;
}

double weighted_pair_cost_grad(const std::vector<double>& w, const Matrix& diffs,
                               const std::vector<double>& weight_pos,
                               const std::vector<double>& weight_neg,
                               double l2_penalty, std::vector<double>& grad) {
  check_weights(diffs, weight_pos, weight_neg);
  const std::size_t d = diffs.cols();
  grad.assign(d, 0.0);
  double cost = 0.0;
  for (std::size_t p = 0; p < diffs.rows(); ++p) {
    const double* row = diffs[p];
    const double m = dot(w.data(), row, d);
    const HingeValue pos = smooth_hinge(m);
    const HingeValue neg = smooth_hinge(-m);
    cost += weight_pos[p] * pos.loss + weight_neg[p] * neg.loss;
    const double coef = weight_pos[p] * pos.derivative - weight_neg[p] * neg.derivative;
    if (coef != 0.0) {
      for (std::size_t k = 0; k < d; ++k) grad[k] += coef * row[k];
    }
  }
  if (l2_penalty != 0.0) {
    double norm2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      norm2 += w[k] * w[k];
      grad[k] += l2_penalty * w[k];
    }
    cost += 0.5 * l2_penalty * norm2;
  }
  return cost;
}

RankerWeights train_ranker(const Matrix& diffs,
                           const std::vector<double>& weight_pos,
                           const std::vector<double>& weight_neg,
                           const TrainConfig& config,
                           const RankerWeights* init) {
  if (diffs.rows() == 0) throw InvalidInput("training needs at least one pair");
  if (config.learning_rate <= 0.0) throw InvalidInput("learning_rate must be > 0");
  if (config.cost_tolerance <= 0.0) throw InvalidInput("cost_tolerance must be > 0");
  if (config.l2_penalty < 0.0) throw InvalidInput("l2_penalty must be >= 0");
  const std::size_t d = diffs.cols();
  if (init && init->w.size() != d)
    throw InvalidInput("warm start dimension does not match pair differences");

  RankerWeights result;
  result.w = init ? init->w : std::vector<double>(d, 0.0);

  std::vector<double> grad;
  double cost = weighted_pair_cost_grad(result.w, diffs, weight_pos, weight_neg,
                                        config.l2_penalty, grad);
  std::vector<double> trial(d);
  for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
    double lr = config.learning_rate;
    bool accepted = false;
    // Attempt 0 uses the configured rate; each retry halves it, 20 at most.
    for (int attempt = 0; attempt <= 20; ++attempt) {
      for (std::size_t k = 0; k < d; ++k) trial[k] = result.w[k] - lr * grad[k];
      const double trial_cost = weighted_pair_cost(trial, diffs, weight_pos,
                                                   weight_neg, config.l2_penalty);
      if (trial_cost <= cost) {
        accepted = true;
        break;
      }
      lr *= 0.5;
    }
    if (!accepted) {
      result.step_search_failed = true;
      break;
    }
    result.w.swap(trial);
    const double previous = cost;
    cost = weighted_pair_cost_grad(result.w, diffs, weight_pos, weight_neg,
                                   config.l2_penalty, grad);
    ++result.trained_iterations;
    if (std::abs(previous - cost) < config.cost_tolerance) break;
  }
  result.final_cost = cost;
  return result;
}

double score(const RankerWeights& weights, std::span<const double> x) {
  if (weights.w.size() != x.size())
    throw InvalidInput("score dimension mismatch");
  return dot(weights.w.data(), x.data(), x.size());
}

}  // namespace crowdrank
