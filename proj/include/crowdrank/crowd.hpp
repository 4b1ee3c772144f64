#pragma once

#include <cstdint>
#include <vector>

#include "crowdrank/types.hpp"
#include "crowdrank/vrjam.hpp"

namespace crowdrank {

enum class CrowdMode { kUniform, kRegion };

struct CrowdSpec {
  CrowdMode mode = CrowdMode::kUniform;
  // Uniform mode: one flip probability per annotator, each in [0, 0.5].
  std::vector<double> b;
  // Region mode: per-annotator, per-cluster flip probabilities with the
  // cluster model that assigns pairs to regions.
  Matrix B;
  ClusterModel regions;
  double alpha = 1.0;  // multiplicative noise scale, effective prob capped at 0.5
  std::uint64_t seed = 0;

  std::size_t num_annotators() const {
    return mode == CrowdMode::kUniform ? b.size() : B.rows();
  }
};

// Flips the ground-truth bit per (annotator, pair) with the effective
// probability min(alpha * b, 0.5), drawn from the stream indexed by
// (seed, annotator, pair position). Annotator ids are "a1".."aK".
AnnotationSet generate_crowd(const LabelColumn& truth, const CrowdSpec& spec,
                             const PairIndex& pairs, const Matrix& diffs);

}  // namespace crowdrank
