#include "crowdrank/crowd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crowdrank/rng.hpp"

namespace crowdrank {

AnnotationSet generate_crowd(const LabelColumn& truth, const CrowdSpec& spec,
                             const PairIndex& pairs, const Matrix& diffs) {
  if (truth.size() != pairs.size())
    throw InvalidInput("truth column length does not match pair index");
  if (!(spec.alpha >= 0.0)) throw InvalidInput("alpha must be >= 0");
  const std::size_t k_count = spec.num_annotators();
  if (k_count == 0) throw InvalidInput("crowd needs at least one annotator");

  std::vector<std::uint32_t> members;
  if (spec.mode == CrowdMode::kUniform) {
    for (double b : spec.b) {
      if (!(b >= 0.0 && b <= 0.5))
        throw InvalidInput("flip probabilities must lie in [0, 0.5]");
    }
  } else {
    if (spec.regions.num_clusters() == 0)
      throw InvalidInput("region mode needs a cluster model");
    if (spec.B.cols() != spec.regions.num_clusters())
      throw InvalidInput("region flip table width does not match cluster count");
    for (double b : spec.B.data()) {
      if (!(b >= 0.0 && b <= 0.5))
        throw InvalidInput("flip probabilities must lie in [0, 0.5]");
    }
    if (diffs.rows() != pairs.size())
      throw InvalidInput("difference rows do not match pair index");
    members = memberships(spec.regions, diffs);
  }

  AnnotationSet out;
  out.pairs = pairs;
  out.annotator_ids.reserve(k_count);
  out.columns.reserve(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    out.annotator_ids.push_back("a" + std::to_string(k + 1));
    LabelColumn col;
    col.bits.resize(pairs.size());
    const std::uint64_t stream = rng::kCrowdBase + k;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const double base =
          spec.mode == CrowdMode::kUniform ? spec.b[k] : spec.B[k][members[p]];
      const double effective = std::min(spec.alpha * base, 0.5);
      const bool flip = rng::uniform01(spec.seed, stream, p) < effective;
      col.bits[p] = truth.bits[p] ^ static_cast<std::uint8_t>(flip);
    }
    out.columns.push_back(std::move(col));
  }
  return out;
}

}  // namespace crowdrank
