#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crowdrank/ranker.hpp"
#include "crowdrank/types.hpp"

namespace crowdrank {

struct EmIterationRecord {
  double log_likelihood;  // observed-data estimate, summed over pairs
  double surrogate;       // expected complete-data term plus entropy
  double entropy;
  double param_delta;     // max of weight and reliability deltas
};

struct EmDiagnostics {
  std::vector<EmIterationRecord> records;
  bool likelihood_drop_warning = false;
};

struct PosteriorTable {
  std::vector<double> q1;  // per-pair belief that the latent preference is 1
};

struct EmConfig {
  TrainConfig train;
  std::size_t max_em_iterations = 200;
  double param_tolerance = 1e-5;
  // Cluster controls (ignored by jam_fit).
  std::size_t clusters = 0;  // 0 selects automatically
  double cluster_threshold_ratio = 0.5;
  std::size_t max_clusters = 8;
};

inline constexpr double kReliabilityFloor = 1e-4;

struct JamModel {
  RankerWeights w;
  std::vector<double> r;  // per-annotator flip probability
  std::size_t iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  EmDiagnostics diagnostics;
};

// Overflow-safe sigmoid of <w, diff>, clamped inside (0, 1).
double logistic_pref_prob(const RankerWeights& w, std::span<const double> diff);

// Posterior per pair, computed in log-odds space:
// q1 = sigmoid(<w,d> + sum_k (2 z_k - 1) log((1-r_k)/r_k)).
PosteriorTable jam_e_step(const RankerWeights& w, const std::vector<double>& r,
                          const AnnotationSet& annotations, const Matrix& diffs);

// Weighted ranker retraining, warm-started from the previous weights.
RankerWeights jam_m_step_w(const PosteriorTable& q, const Matrix& diffs,
                           const TrainConfig& config,
                           const RankerWeights& warm_start);

// Closed-form flip-probability update: expected disagreement with the
// posterior, clamped to [1e-4, 1 - 1e-4].
std::vector<double> jam_m_step_r(const PosteriorTable& q,
                                 const AnnotationSet& annotations);

JamModel jam_fit(const AnnotationSet& annotations, const ItemTable& items,
                 const EmConfig& config, std::uint64_t seed);

// MAP labels from the fitted model; q1 exactly 0.5 falls to the seeded coin.
LabelColumn jam_infer(const JamModel& model, const AnnotationSet& annotations,
                      const Matrix& diffs);

}  // namespace crowdrank
