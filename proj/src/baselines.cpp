#include "crowdrank/baselines.hpp"

#include "crowdrank/core.hpp"
#include "crowdrank/rng.hpp"

namespace crowdrank {

LabelColumn majority_vote(const AnnotationSet& annotations, std::uint64_t seed) {
  const std::size_t num_pairs = annotations.num_pairs();
  const std::size_t k = annotations.num_annotators();
  if (k == 0) throw InvalidInput("majority vote needs at least one annotator");
  LabelColumn out;
  out.bits.resize(num_pairs);
  for (std::size_t p = 0; p < num_pairs; ++p) {
    std::size_t ones = 0;
    for (const LabelColumn& col : annotations.columns) ones += col.bits[p];
    if (2 * ones > k) {
      out.bits[p] = 1;
    } else if (2 * ones < k) {
      out.bits[p] = 0;
    } else {
      out.bits[p] = rng::uniform01(seed, rng::kMvTie, p) < 0.5 ? 1 : 0;
    }
  }
  return out;
}

IamModel iam_train(const AnnotationSet& annotations, const ItemTable& items,
                   const TrainConfig& config) {
  const Matrix diffs = pair_differences(items, annotations.pairs);
  IamModel model;
  model.annotator_ids = annotations.annotator_ids;
  model.rankers.reserve(annotations.num_annotators());
  std::vector<double> weight_pos(annotations.num_pairs());
  std::vector<double> weight_neg(annotations.num_pairs());
  for (const LabelColumn& col : annotations.columns) {
    for (std::size_t p = 0; p < col.size(); ++p) {
      weight_pos[p] = col.bits[p];
      weight_neg[p] = 1.0 - col.bits[p];
    }
    model.rankers.push_back(train_ranker(diffs, weight_pos, weight_neg, config));
  }
  return model;
}

LabelColumn iam_fuse(const IamModel& model, const ItemTable& items,
                     const PairIndex& pairs) {
  const std::size_t n = items.size();
  const std::size_t d = items.dim();
  std::vector<double> summed(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = items.attrs[i];
    double s = 0.0;
    for (const RankerWeights& rk : model.rankers)
      s += score(rk, std::span<const double>(x, d));
    summed[i] = s;
  }
  LabelColumn out;
  out.bits.reserve(pairs.size());
  for (const Pair& p : pairs.pairs)
    out.bits.push_back(summed[p.i] > summed[p.j] ? 1 : 0);
  return out;
}

}  // namespace crowdrank
