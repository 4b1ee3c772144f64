#include "crowdrank/vrjam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crowdrank/core.hpp"
#include "crowdrank/rng.hpp"
#include "em_engine.hpp"

namespace crowdrank {

namespace {

double squared_distance(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double c = a[k] - b[k];
    s += c * c;
  }
  return s;
}

std::size_t nearest_centroid(const Matrix& centroids, const double* point) {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const double dist = squared_distance(centroids[c], point, centroids.cols());
    if (dist < best_dist) {
      best_dist = dist;
      best = c;
    }
  }
  return best;
}

}  // namespace

ClusterModel kmeans_fit(const Matrix& points, std::size_t num_clusters,
                        std::uint64_t seed, std::size_t max_iter) {
  const std::size_t n = points.rows();
  const std::size_t d = points.cols();
  if (num_clusters < 1) throw InvalidInput("cluster count must be >= 1");
  if (num_clusters > n) throw InvalidInput("more clusters than points");

  std::uint64_t counter = 0;
  auto draw = [&] { return rng::uniform01(seed, rng::kKmeans, counter++); };

  // k-means++ seeding.
  Matrix centroids(num_clusters, d);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t first = static_cast<std::size_t>(draw() * static_cast<double>(n));
  first = std::min(first, n - 1);
  std::copy(points[first], points[first] + d, centroids[0]);
  for (std::size_t c = 1; c < num_clusters; ++c) {
    double total = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      nearest[p] = std::min(nearest[p], squared_distance(points[p], centroids[c - 1], d));
      total += nearest[p];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = draw() * total;
      double cum = 0.0;
      std::size_t last_positive = 0;
      bool found = false;
      for (std::size_t p = 0; p < n; ++p) {
        if (nearest[p] <= 0.0) continue;
        last_positive = p;
        cum += nearest[p];
        if (cum >= target) {
          pick = p;
          found = true;
          break;
        }
      }
      if (!found) pick = last_positive;
    } else {
      // Every point coincides with a chosen centroid; duplicate the first.
      pick = first;
    }
    std::copy(points[pick], points[pick] + d, centroids[c]);
  }

  std::vector<std::uint32_t> assign(n, 0);
  std::vector<std::size_t> counts(num_clusters);
  bool have_assignment = false;
  for (std::size_t round = 0; round < max_iter; ++round) {
    bool changed = false;
    for (std::size_t p = 0; p < n; ++p) {
      const std::uint32_t m =
          static_cast<std::uint32_t>(nearest_centroid(centroids, points[p]));
      if (!have_assignment || m != assign[p]) changed = true;
      assign[p] = m;
    }
    have_assignment = true;

    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t p = 0; p < n; ++p) ++counts[assign[p]];
    for (std::size_t c = 0; c < num_clusters; ++c) {
      if (counts[c] > 0) continue;
      // Re-seed an empty cluster to the point farthest from its centroid.
      std::size_t farthest = 0;
      double far_dist = -1.0;
      for (std::size_t p = 0; p < n; ++p) {
        if (counts[assign[p]] <= 1) continue;  // do not empty another cluster
        const double dist = squared_distance(points[p], centroids[assign[p]], d);
        if (dist > far_dist) {
          far_dist = dist;
          farthest = p;
        }
      }
      if (far_dist < 0.0) continue;
      --counts[assign[farthest]];
      assign[farthest] = static_cast<std::uint32_t>(c);
      ++counts[c];
      changed = true;
    }

    if (!changed) break;
    for (std::size_t c = 0; c < num_clusters; ++c) {
      if (counts[c] == 0) continue;
      double* row = centroids[c];
      std::fill(row, row + d, 0.0);
      for (std::size_t p = 0; p < n; ++p) {
        if (assign[p] != c) continue;
        const double* x = points[p];
        for (std::size_t k = 0; k < d; ++k) row[k] += x[k];
      }
      for (std::size_t k = 0; k < d; ++k) row[k] /= static_cast<double>(counts[c]);
    }
  }

  ClusterModel model;
  model.centroids = std::move(centroids);
  return model;
}

double kmeans_objective(const Matrix& points, const ClusterModel& clusters) {
  double total = 0.0;
  for (std::size_t p = 0; p < points.rows(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < clusters.centroids.rows(); ++c) {
      best = std::min(best, squared_distance(points[p], clusters.centroids[c],
                                             points.cols()));
    }
    total += best;
  }
  return total;
}

std::size_t select_num_clusters(const Matrix& points, double threshold_ratio,
                                std::size_t max_clusters, std::uint64_t seed) {
  if (points.rows() == 0) throw InvalidInput("no points");
  if (!(threshold_ratio > 0.0 && threshold_ratio < 1.0))
    throw InvalidInput("threshold_ratio must lie in (0,1)");
  const std::size_t cap = std::min(max_clusters, points.rows());
  if (cap <= 1) return cap;

  for (std::size_t num = 2; num <= cap; ++num) {
    const ClusterModel model = kmeans_fit(points, num, seed);
    std::vector<double> dists;
    dists.reserve(num * (num - 1) / 2);
    for (std::size_t a = 0; a + 1 < num; ++a)
      for (std::size_t b = a + 1; b < num; ++b)
        dists.push_back(std::sqrt(squared_distance(model.centroids[a],
                                                   model.centroids[b],
                                                   model.centroids.cols())));
    std::sort(dists.begin(), dists.end());
    const double min_dist = dists.front();
    const std::size_t half = dists.size() / 2;
    const double median = dists.size() % 2 == 1
                              ? dists[half]
                              : 0.5 * (dists[half - 1] + dists[half]);
    if (min_dist < threshold_ratio * median) return num - 1;
  }
  return cap;
}

std::size_t membership(const ClusterModel& clusters, std::span<const double> diff) {
  if (diff.size() != clusters.centroids.cols())
    throw InvalidInput("membership dimension mismatch");
  return nearest_centroid(clusters.centroids, diff.data());
}

std::vector<std::uint32_t> memberships(const ClusterModel& clusters,
                                       const Matrix& diffs) {
  std::vector<std::uint32_t> out(diffs.rows());
  for (std::size_t p = 0; p < diffs.rows(); ++p)
    out[p] = static_cast<std::uint32_t>(nearest_centroid(clusters.centroids, diffs[p]));
  return out;
}

PosteriorTable vrjam_e_step(const RankerWeights& w, const Matrix& reliability,
                            const AnnotationSet& annotations, const Matrix& diffs,
                            const std::vector<std::uint32_t>& members) {
  if (reliability.rows() != annotations.num_annotators())
    throw InvalidInput("one reliability row per annotator required");
  if (members.size() != annotations.num_pairs())
    throw InvalidInput("membership length does not match pair count");
  return detail::posterior(w, reliability, annotations, diffs, members);
}

Matrix vrjam_m_step_R(const PosteriorTable& q, const AnnotationSet& annotations,
                      const std::vector<std::uint32_t>& members,
                      std::size_t num_clusters, const Matrix& previous) {
  return detail::reliability_update(q, annotations, members, num_clusters, previous);
}

VrjamModel vrjam_fit(const AnnotationSet& annotations, const ItemTable& items,
                     const EmConfig& config, std::uint64_t seed) {
  const Matrix diffs = pair_differences(items, annotations.pairs);
  const std::size_t num_clusters =
      config.clusters > 0
          ? config.clusters
          : select_num_clusters(diffs, config.cluster_threshold_ratio,
                                config.max_clusters, seed);
  ClusterModel clusters = kmeans_fit(diffs, num_clusters, seed);
  clusters.threshold_used = config.cluster_threshold_ratio;
  const std::vector<std::uint32_t> members = memberships(clusters, diffs);

  detail::EmFitResult fit =
      detail::run_em(diffs, annotations, members, num_clusters, config, seed);

  VrjamModel model;
  model.w = std::move(fit.w);
  model.reliability = std::move(fit.reliability);
  model.clusters = std::move(clusters);
  model.iterations = fit.iterations;
  model.converged = fit.converged;
  model.seed = seed;
  model.diagnostics = std::move(fit.diagnostics);
  return model;
}

LabelColumn vrjam_infer(const VrjamModel& model, const AnnotationSet& annotations,
                        const Matrix& diffs) {
  const std::vector<std::uint32_t> members = memberships(model.clusters, diffs);
  const PosteriorTable q =
      detail::posterior(model.w, model.reliability, annotations, diffs, members);
  return detail::map_labels(q, model.seed);
}

}  // namespace crowdrank
