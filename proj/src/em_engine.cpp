#include "em_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crowdrank/rng.hpp"

namespace crowdrank::detail {

double stable_sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double log_sigmoid(double t) {
  if (t >= 0.0) return -std::log1p(std::exp(-t));
  return t - std::log1p(std::exp(t));
}

namespace {

double log_sum_exp(double a, double b) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double bernoulli_entropy(double q) {
  double h = 0.0;
  if (q > 0.0) h -= q * std::log(q);
  if (q < 1.0) h -= (1.0 - q) * std::log(1.0 - q);
  return h;
}

double margin(const RankerWeights& w, const double* row, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += w.w[k] * row[k];
  return s;
}

struct ElboTerms {
  double log_likelihood;
  double surrogate;
  double entropy;
};

// Observed-data log likelihood and the expected complete-data bound, both
// evaluated at the freshly updated parameters with the current posterior.
ElboTerms elbo_terms(const RankerWeights& w, const Matrix& reliability,
                     const AnnotationSet& annotations, const Matrix& diffs,
                     const std::vector<std::uint32_t>& members,
                     const PosteriorTable& q) {
  const std::size_t num_pairs = annotations.num_pairs();
  const std::size_t k_count = annotations.num_annotators();
  const std::size_t num_clusters = reliability.cols();
  const std::size_t d = diffs.cols();

  Matrix log_r(k_count, num_clusters);
  Matrix log_1mr(k_count, num_clusters);
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t m = 0; m < num_clusters; ++m) {
      log_r[k][m] = std::log(reliability[k][m]);
      log_1mr[k][m] = std::log1p(-reliability[k][m]);
    }
  }

  ElboTerms terms{0.0, 0.0, 0.0};
  for (std::size_t p = 0; p < num_pairs; ++p) {
    const double s = margin(w, diffs[p], d);
    double a1 = log_sigmoid(s);
    double a0 = log_sigmoid(-s);
    const std::uint32_t m = members[p];
    for (std::size_t k = 0; k < k_count; ++k) {
      if (annotations.columns[k].bits[p]) {
        a1 += log_1mr[k][m];
        a0 += log_r[k][m];
      } else {
        a1 += log_r[k][m];
        a0 += log_1mr[k][m];
      }
    }
    const double q1 = q.q1[p];
    terms.log_likelihood += log_sum_exp(a1, a0);
    terms.surrogate += q1 * a1 + (1.0 - q1) * a0;
    terms.entropy += bernoulli_entropy(q1);
  }
  terms.surrogate += terms.entropy;
  return terms;
}

}  // namespace

PosteriorTable posterior(const RankerWeights& w, const Matrix& reliability,
                         const AnnotationSet& annotations, const Matrix& diffs,
                         const std::vector<std::uint32_t>& members) {
  const std::size_t num_pairs = annotations.num_pairs();
  const std::size_t k_count = annotations.num_annotators();
  const std::size_t num_clusters = reliability.cols();
  const std::size_t d = diffs.cols();

  // lambda[k][m] = log((1 - R) / R), the annotator's log-odds contribution.
  Matrix lambda(k_count, num_clusters);
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t m = 0; m < num_clusters; ++m) {
      const double r = reliability[k][m];
      lambda[k][m] = std::log1p(-r) - std::log(r);
    }
  }

  PosteriorTable q;
  q.q1.resize(num_pairs);
  for (std::size_t p = 0; p < num_pairs; ++p) {
    double llr = margin(w, diffs[p], d);
    const std::uint32_t m = members[p];
    for (std::size_t k = 0; k < k_count; ++k) {
      if (annotations.columns[k].bits[p]) {
        llr += lambda[k][m];
      } else {
        llr -= lambda[k][m];
      }
    }
    q.q1[p] = stable_sigmoid(llr);
  }
  return q;
}

Matrix reliability_update(const PosteriorTable& q, const AnnotationSet& annotations,
                          const std::vector<std::uint32_t>& members,
                          std::size_t num_clusters, const Matrix& previous) {
  const std::size_t num_pairs = annotations.num_pairs();
  const std::size_t k_count = annotations.num_annotators();

  std::vector<std::size_t> cluster_pairs(num_clusters, 0);
  for (std::size_t p = 0; p < num_pairs; ++p) ++cluster_pairs[members[p]];

  Matrix updated(k_count, num_clusters);
  std::vector<double> disagreement(num_clusters);
  for (std::size_t k = 0; k < k_count; ++k) {
    std::fill(disagreement.begin(), disagreement.end(), 0.0);
    const LabelColumn& col = annotations.columns[k];
    for (std::size_t p = 0; p < num_pairs; ++p) {
      const double q1 = q.q1[p];
      disagreement[members[p]] += col.bits[p] ? 1.0 - q1 : q1;
    }
    for (std::size_t m = 0; m < num_clusters; ++m) {
      if (cluster_pairs[m] == 0) {
        updated[k][m] = previous[k][m];
      } else {
        const double rate = disagreement[m] / static_cast<double>(cluster_pairs[m]);
        updated[k][m] = std::clamp(rate, kReliabilityFloor, 1.0 - kReliabilityFloor);
      }
    }
  }
  return updated;
}

EmFitResult run_em(const Matrix& diffs, const AnnotationSet& annotations,
                   const std::vector<std::uint32_t>& members,
                   std::size_t num_clusters, const EmConfig& config,
                   std::uint64_t seed) {
  const std::size_t d = diffs.cols();
  const std::size_t k_count = annotations.num_annotators();
  const std::size_t num_pairs = annotations.num_pairs();
  if (num_pairs == 0) throw InvalidInput("EM needs at least one pair");

  EmFitResult fit;
  fit.w.w.resize(d);
  for (std::size_t j = 0; j < d; ++j)
    fit.w.w[j] = -0.01 + 0.02 * rng::uniform01(seed, rng::kInitW, j);
  Matrix reliability(k_count, num_clusters);
  for (std::size_t k = 0; k < k_count; ++k)
    for (std::size_t m = 0; m < num_clusters; ++m)
      reliability[k][m] =
          0.05 + 0.40 * rng::uniform01(seed, rng::kInitR, k * num_clusters + m);

  std::vector<double> weight_pos(num_pairs), weight_neg(num_pairs);
  double best_ll = -std::numeric_limits<double>::infinity();
  RankerWeights best_w;
  Matrix best_reliability;
  double prev_ll = 0.0;

  for (std::size_t iter = 1; iter <= config.max_em_iterations; ++iter) {
    const PosteriorTable q = posterior(fit.w, reliability, annotations, diffs, members);

    for (std::size_t p = 0; p < num_pairs; ++p) {
      weight_pos[p] = q.q1[p];
      weight_neg[p] = 1.0 - q.q1[p];
    }
    RankerWeights w_new =
        train_ranker(diffs, weight_pos, weight_neg, config.train, &fit.w);
    Matrix rel_new =
        reliability_update(q, annotations, members, num_clusters, reliability);

    double delta = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      delta = std::max(delta, std::abs(w_new.w[j] - fit.w.w[j]));
    for (std::size_t k = 0; k < k_count; ++k)
      for (std::size_t m = 0; m < num_clusters; ++m)
        delta = std::max(delta, std::abs(rel_new[k][m] - reliability[k][m]));

    const ElboTerms terms =
        elbo_terms(w_new, rel_new, annotations, diffs, members, q);
    fit.diagnostics.records.push_back(
        {terms.log_likelihood, terms.surrogate, terms.entropy, delta});
    if (iter > 1 && terms.log_likelihood < prev_ll - 1e-3)
      fit.diagnostics.likelihood_drop_warning = true;
    prev_ll = terms.log_likelihood;
    if (terms.log_likelihood > best_ll) {
      best_ll = terms.log_likelihood;
      best_w = w_new;
      best_reliability = rel_new;
    }

    fit.w = std::move(w_new);
    reliability = std::move(rel_new);
    fit.iterations = iter;
    if (delta < config.param_tolerance) {
      fit.converged = true;
      break;
    }
  }

  if (!fit.converged && !fit.diagnostics.records.empty()) {
    fit.w = std::move(best_w);
    reliability = std::move(best_reliability);
  }
  fit.reliability = std::move(reliability);
  return fit;
}

LabelColumn map_labels(const PosteriorTable& q, std::uint64_t seed) {
  LabelColumn out;
  out.bits.resize(q.q1.size());
  for (std::size_t p = 0; p < q.q1.size(); ++p) {
    if (q.q1[p] > 0.5) {
      out.bits[p] = 1;
    } else if (q.q1[p] < 0.5) {
      out.bits[p] = 0;
    } else {
      out.bits[p] = rng::uniform01(seed, rng::kInferTie, p) < 0.5 ? 1 : 0;
    }
  }
  return out;
}

}  // namespace crowdrank::detail
