#include "crowdrank/jam.hpp"

#include <cmath>
#include <limits>

#include "crowdrank/core.hpp"
#include "em_engine.hpp"

namespace crowdrank {

namespace {

Matrix column_matrix(const std::vector<double>& r) {
  Matrix m(r.size(), 1);
  for (std::size_t k = 0; k < r.size(); ++k) m[k][0] = r[k];
  return m;
}

}  // namespace

double logistic_pref_prob(const RankerWeights& w, std::span<const double> diff) {
  if (w.w.size() != diff.size()) throw InvalidInput("dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < diff.size(); ++k) s += w.w[k] * diff[k];
  const double v = detail::stable_sigmoid(s);
  if (v <= 0.0) return std::numeric_limits<double>::min();
  if (v >= 1.0) return std::nextafter(1.0, 0.0);
  return v;
}

PosteriorTable jam_e_step(const RankerWeights& w, const std::vector<double>& r,
                          const AnnotationSet& annotations, const Matrix& diffs) {
  if (r.size() != annotations.num_annotators())
    throw InvalidInput("one flip probability per annotator required");
  for (double rk : r) {
    if (!(rk > 0.0 && rk < 1.0))
      throw InvalidInput("flip probabilities must lie in (0,1)");
  }
  const std::vector<std::uint32_t> members(annotations.num_pairs(), 0);
  return detail::posterior(w, column_matrix(r), annotations, diffs, members);
}

RankerWeights jam_m_step_w(const PosteriorTable& q, const Matrix& diffs,
                           const TrainConfig& config,
                           const RankerWeights& warm_start) {
  std::vector<double> weight_pos(q.q1.size()), weight_neg(q.q1.size());
  for (std::size_t p = 0; p < q.q1.size(); ++p) {
    weight_pos[p] = q.q1[p];
    weight_neg[p] = 1.0 - q.q1[p];
  }
  return train_ranker(diffs, weight_pos, weight_neg, config, &warm_start);
}

std::vector<double> jam_m_step_r(const PosteriorTable& q,
                                 const AnnotationSet& annotations) {
  if (annotations.num_pairs() == 0) throw InvalidInput("no pairs");
  const std::vector<std::uint32_t> members(annotations.num_pairs(), 0);
  const Matrix previous(annotations.num_annotators(), 1);
  const Matrix updated =
      detail::reliability_update(q, annotations, members, 1, previous);
  std::vector<double> r(annotations.num_annotators());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = updated[k][0];
  return r;
}

JamModel jam_fit(const AnnotationSet& annotations, const ItemTable& items,
                 const EmConfig& config, std::uint64_t seed) {
  const Matrix diffs = pair_differences(items, annotations.pairs);
  const std::vector<std::uint32_t> members(annotations.num_pairs(), 0);
  detail::EmFitResult fit =
      detail::run_em(diffs, annotations, members, 1, config, seed);

  JamModel model;
  model.w = std::move(fit.w);
  model.r.resize(annotations.num_annotators());
  for (std::size_t k = 0; k < model.r.size(); ++k) model.r[k] = fit.reliability[k][0];
  model.iterations = fit.iterations;
  model.converged = fit.converged;
  model.seed = seed;
  model.diagnostics = std::move(fit.diagnostics);
  return model;
}

LabelColumn jam_infer(const JamModel& model, const AnnotationSet& annotations,
                      const Matrix& diffs) {
  const std::vector<std::uint32_t> members(annotations.num_pairs(), 0);
  const PosteriorTable q =
      detail::posterior(model.w, column_matrix(model.r), annotations, diffs, members);
  return detail::map_labels(q, model.seed);
}

}  // namespace crowdrank
