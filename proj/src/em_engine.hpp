#pragma once

#include <cstdint>
#include <vector>

#include "crowdrank/jam.hpp"
#include "crowdrank/types.hpp"

namespace crowdrank::detail {

struct EmFitResult {
  RankerWeights w;
  Matrix reliability;  // annotators x clusters
  std::size_t iterations = 0;
  bool converged = false;
  EmDiagnostics diagnostics;
};

// Posterior in log-odds form: q1 = sigmoid(<w,d_p> + sum_k s_kp * lambda_k),
// lambda_k = log((1-R[k][m_p]) / R[k][m_p]), s_kp = +1 when annotator k says
// 1 on pair p and -1 otherwise.
PosteriorTable posterior(const RankerWeights& w, const Matrix& reliability,
                         const AnnotationSet& annotations, const Matrix& diffs,
                         const std::vector<std::uint32_t>& members);

// Per-cluster expected disagreement with the posterior, clamped to
// [1e-4, 1-1e-4]; clusters with no pairs keep their previous entry.
Matrix reliability_update(const PosteriorTable& q, const AnnotationSet& annotations,
                          const std::vector<std::uint32_t>& members,
                          std::size_t num_clusters, const Matrix& previous);

// Shared EM loop. jam_fit runs it with one cluster and all-zero memberships,
// which makes the scalar-reliability model a bit-exact special case.
EmFitResult run_em(const Matrix& diffs, const AnnotationSet& annotations,
                   const std::vector<std::uint32_t>& members,
                   std::size_t num_clusters, const EmConfig& config,
                   std::uint64_t seed);

double stable_sigmoid(double t);
double log_sigmoid(double t);

// Ties at q1 == 0.5 fall to the seeded coin on the inference stream.
LabelColumn map_labels(const PosteriorTable& q, std::uint64_t seed);

}  // namespace crowdrank::detail
