#include "crowdrank/eval.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "crowdrank/baselines.hpp"
#include "crowdrank/core.hpp"
#include "crowdrank/crowd.hpp"
#include "crowdrank/ranker.hpp"
#include "crowdrank/vrjam.hpp"
#include "em_engine.hpp"

namespace crowdrank {

namespace {

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw ParseError(path + ": cannot open file for writing");
  }
  file << body;
}

struct SweepInputs {
  ItemTable items;
  PairIndex pairs;
  LabelColumn truth;
  Matrix diffs;
};

SweepInputs prepare_inputs(const ItemTable& items,
                           const std::vector<double>& quality,
                           bool standardize) {
  if (quality.size() != items.size()) {
    throw InvalidInput("score count does not match item count");
  }
  SweepInputs in;
  if (standardize) {
    in.items = standardize_features(items).items;
  } else {
    in.items = items;
  }
  in.pairs = build_pair_index(in.items, &quality);
  in.truth = ground_truth_labels(in.pairs, quality);
  in.diffs = pair_differences(in.items, in.pairs);
  return in;
}

// One crowd draw, four methods. The crowd seed doubles as the fit seed so
// repetitions stay independent while a single rep is fully reproducible.
void run_methods(const SweepInputs& in, const CrowdSpec& spec, double param,
                 std::size_t rep, const SweepConfig& config,
                 std::vector<SweepCell>& grid) {
  AnnotationSet annotations = generate_crowd(in.truth, spec, in.pairs, in.diffs);
  const std::uint64_t fit_seed = spec.seed;

  LabelColumn mv = majority_vote(annotations, fit_seed);
  grid.push_back({param, "mv", rep, pairwise_accuracy(mv, in.truth)});

  IamModel iam = iam_train(annotations, in.items, config.em.train);
  LabelColumn iam_pred = iam_fuse(iam, in.items, in.pairs);
  grid.push_back({param, "iam", rep, pairwise_accuracy(iam_pred, in.truth)});

  JamModel jam = jam_fit(annotations, in.items, config.em, fit_seed);
  LabelColumn jam_pred = jam_infer(jam, annotations, in.diffs);
  grid.push_back({param, "jam", rep, pairwise_accuracy(jam_pred, in.truth)});

  VrjamModel vrjam = vrjam_fit(annotations, in.items, config.em, fit_seed);
  LabelColumn vrjam_pred = vrjam_infer(vrjam, annotations, in.diffs);
  grid.push_back({param, "vrjam", rep, pairwise_accuracy(vrjam_pred, in.truth)});
}

std::vector<SweepSummaryRow> summarize(const std::vector<SweepCell>& grid) {
  std::vector<SweepSummaryRow> rows;
  std::vector<std::pair<double, std::string>> order;
  std::map<std::pair<double, std::string>, std::vector<double>> cells;
  for (const auto& cell : grid) {
    auto key = std::make_pair(cell.param, cell.method);
    auto [it, fresh] = cells.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.push_back(cell.accuracy);
  }
  for (const auto& key : order) {
    const auto& acc = cells[key];
    double mean = 0.0;
    for (double a : acc) mean += a;
    mean /= static_cast<double>(acc.size());
    double var = 0.0;
    if (acc.size() > 1) {
      for (double a : acc) var += (a - mean) * (a - mean);
      var /= static_cast<double>(acc.size() - 1);
    }
    rows.push_back({key.first, key.second, acc.size(), mean, std::sqrt(var)});
  }
  return rows;
}

}  // namespace

double pairwise_accuracy(const LabelColumn& pred, const LabelColumn& truth) {
  if (pred.bits.size() != truth.bits.size()) {
    throw InvalidInput("label columns differ in length");
  }
  if (pred.bits.empty()) {
    throw InvalidInput("label columns are empty");
  }
  std::size_t hits = 0;
  for (std::size_t p = 0; p < pred.bits.size(); ++p) {
    if (pred.bits[p] == truth.bits[p]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pred.bits.size());
}

McNemarResult mcnemar_test(const LabelColumn& pred_a, const LabelColumn& pred_b,
                           const LabelColumn& truth) {
  if (pred_a.bits.size() != truth.bits.size() ||
      pred_b.bits.size() != truth.bits.size()) {
    throw InvalidInput("label columns differ in length");
  }
  std::size_t only_a = 0;
  std::size_t only_b = 0;
  for (std::size_t p = 0; p < truth.bits.size(); ++p) {
    const bool a_ok = pred_a.bits[p] == truth.bits[p];
    const bool b_ok = pred_b.bits[p] == truth.bits[p];
    if (a_ok && !b_ok) ++only_a;
    if (!a_ok && b_ok) ++only_b;
  }
  McNemarResult result{0.0, false};
  const double discordant = static_cast<double>(only_a + only_b);
  if (discordant > 0.0) {
    const double diff =
        std::abs(static_cast<double>(only_a) - static_cast<double>(only_b));
    const double corrected = std::abs(diff - 1.0);
    result.statistic = corrected * corrected / discordant;
  }
  result.significant_at_5pct = result.statistic > 3.841;
  return result;
}

SweepResult run_noise_sweep(const ItemTable& items,
                            const std::vector<double>& quality,
                            const std::vector<double>& base_b,
                            const std::vector<double>& alpha_grid,
                            const SweepConfig& config, std::uint64_t seed) {
  if (alpha_grid.empty()) {
    throw InvalidInput("alpha grid is empty");
  }
  if (config.reps == 0) {
    throw InvalidInput("reps must be positive");
  }
  SweepInputs in = prepare_inputs(items, quality, config.standardize);
  SweepResult result;
  for (double alpha : alpha_grid) {
    for (std::size_t rep = 0; rep < config.reps; ++rep) {
      CrowdSpec spec;
      spec.mode = CrowdMode::kUniform;
      spec.b = base_b;
      spec.alpha = alpha;
      spec.seed = seed + rep;
      run_methods(in, spec, alpha, rep, config, result.grid);
    }
  }
  result.summary = summarize(result.grid);
  return result;
}

SweepResult run_annotator_sweep(const ItemTable& items,
                                const std::vector<double>& quality,
                                const std::vector<std::size_t>& k_grid,
                                const SweepConfig& config, std::uint64_t seed) {
  if (k_grid.empty()) {
    throw InvalidInput("annotator count grid is empty");
  }
  if (config.reps == 0) {
    throw InvalidInput("reps must be positive");
  }
  for (std::size_t k : k_grid) {
    if (k < 1 || k > 10) {
      throw InvalidInput("annotator counts must lie in [1, 10]");
    }
  }
  SweepInputs in = prepare_inputs(items, quality, config.standardize);
  SweepResult result;
  for (std::size_t num : k_grid) {
    std::vector<double> b(num);
    for (std::size_t k = 0; k < num; ++k) {
      b[k] = static_cast<double>(k + 1) / 20.0;
    }
    for (std::size_t rep = 0; rep < config.reps; ++rep) {
      CrowdSpec spec;
      spec.mode = CrowdMode::kUniform;
      spec.b = b;
      spec.alpha = 1.0;
      spec.seed = seed + rep;
      run_methods(in, spec, static_cast<double>(num), rep, config, result.grid);
    }
  }
  result.summary = summarize(result.grid);
  return result;
}

LossGrid loss_comparison_grid(double min_input, double max_input, double step) {
  if (!(step > 0.0)) {
    throw InvalidInput("step must be positive");
  }
  if (!(min_input <= max_input)) {
    throw InvalidInput("grid bounds are inverted");
  }
  const auto count =
      static_cast<std::size_t>(std::floor((max_input - min_input) / step +
                                          1e-9)) +
      1;
  LossGrid grid;
  grid.rows.reserve(count);
  grid.max_abs_diff = 0.0;
  for (std::size_t n = 0; n < count; ++n) {
    const double m = min_input + static_cast<double>(n) * step;
    LossGridRow row;
    row.input = m;
    row.neg_hinge = -smooth_hinge(m).loss;
    row.log_logistic = detail::log_sigmoid(m);
    const double diff = std::abs(row.neg_hinge - row.log_logistic);
    if (diff > grid.max_abs_diff) grid.max_abs_diff = diff;
    grid.rows.push_back(row);
  }
  return grid;
}

void save_sweep_csv(const std::string& path, const SweepResult& result) {
  std::ostringstream out;
  out << "param,method,rep,accuracy\n";
  for (const auto& cell : result.grid) {
    out << format_double(cell.param) << ',' << cell.method << ',' << cell.rep
        << ',' << format_double(cell.accuracy) << '\n';
  }
  write_file(path, out.str());
}

void save_sweep_summary_csv(const std::string& path, const SweepResult& result) {
  std::ostringstream out;
  out << "param,method,reps,mean,std\n";
  for (const auto& row : result.summary) {
    out << format_double(row.param) << ',' << row.method << ',' << row.reps
        << ',' << format_double(row.mean) << ',' << format_double(row.stddev)
        << '\n';
  }
  write_file(path, out.str());
}

void save_loss_grid_csv(const std::string& path, const LossGrid& grid) {
  std::ostringstream out;
  out << "input,neg_hinge,log_logistic\n";
  for (const auto& row : grid.rows) {
    out << format_double(row.input) << ',' << format_double(row.neg_hinge)
        << ',' << format_double(row.log_logistic) << '\n';
  }
  write_file(path, out.str());
}

}  // namespace crowdrank
