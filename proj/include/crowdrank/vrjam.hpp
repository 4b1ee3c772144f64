#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crowdrank/jam.hpp"
#include "crowdrank/types.hpp"

namespace crowdrank {

struct ClusterModel {
  Matrix centroids;  // one row per cluster
  double threshold_used = 0.0;
  std::size_t num_clusters() const { return centroids.rows(); }
};

// Lloyd's algorithm with seeded k-means++ initialization. Stops when
// assignments stabilize or after max_iter update rounds. Empty clusters are
// re-seeded to the point farthest from its assigned centroid.
ClusterModel kmeans_fit(const Matrix& points, std::size_t num_clusters,
                        std::uint64_t seed, std::size_t max_iter = 100);

double kmeans_objective(const Matrix& points, const ClusterModel& clusters);

// Grows the cluster count from 2 upward and returns the largest count whose
// minimum inter-centroid distance stays at or above threshold_ratio times
// the median inter-centroid distance; capped at max_clusters.
std::size_t select_num_clusters(const Matrix& points, double threshold_ratio,
                                std::size_t max_clusters, std::uint64_t seed);

// Nearest centroid by Euclidean distance; ties break to the lowest index.
std::size_t membership(const ClusterModel& clusters, std::span<const double> diff);

std::vector<std::uint32_t> memberships(const ClusterModel& clusters,
                                       const Matrix& diffs);

struct VrjamModel {
  RankerWeights w;
  Matrix reliability;  // annotators x clusters
  ClusterModel clusters;
  std::size_t iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  EmDiagnostics diagnostics;
};

PosteriorTable vrjam_e_step(const RankerWeights& w, const Matrix& reliability,
                            const AnnotationSet& annotations, const Matrix& diffs,
                            const std::vector<std::uint32_t>& members);

// Per-cluster expected disagreement; clusters with no pairs keep their
// previous entry.
Matrix vrjam_m_step_R(const PosteriorTable& q, const AnnotationSet& annotations,
                      const std::vector<std::uint32_t>& members,
                      std::size_t num_clusters, const Matrix& previous);

VrjamModel vrjam_fit(const AnnotationSet& annotations, const ItemTable& items,
                     const EmConfig& config, std::uint64_t seed);

LabelColumn vrjam_infer(const VrjamModel& model, const AnnotationSet& annotations,
                        const Matrix& diffs);

}  // namespace crowdrank
