#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crowdrank/jam.hpp"
#include "crowdrank/types.hpp"

namespace crowdrank {

double pairwise_accuracy(const LabelColumn& pred, const LabelColumn& truth);

struct McNemarResult {
  double statistic;
  bool significant_at_5pct;
};

// Continuity-corrected chi-square on the discordant counts against a
// 3.841 critical value.
McNemarResult mcnemar_test(const LabelColumn& pred_a, const LabelColumn& pred_b,
                           const LabelColumn& truth);

struct SweepCell {
  double param;
  std::string method;
  std::size_t rep;
  double accuracy;
};

struct SweepSummaryRow {
  double param;
  std::string method;
  std::size_t reps;
  double mean;
  double stddev;  // sample standard deviation
};

struct SweepResult {
  std::vector<SweepCell> grid;
  std::vector<SweepSummaryRow> summary;
};

struct SweepConfig {
  EmConfig em;
  std::size_t reps = 5;
  bool standardize = true;
};

// For each alpha and repetition: regenerate the crowd with seed + rep and
// run MV, IAM, JAM, VRJAM against the score-derived truth.
SweepResult run_noise_sweep(const ItemTable& items, const std::vector<double>& quality,
                            const std::vector<double>& base_b,
                            const std::vector<double>& alpha_grid,
                            const SweepConfig& config, std::uint64_t seed);

// Same protocol over annotator counts, with flip probabilities k/20.
SweepResult run_annotator_sweep(const ItemTable& items, const std::vector<double>& quality,
                                const std::vector<std::size_t>& k_grid,
                                const SweepConfig& config, std::uint64_t seed);

struct LossGridRow {
  double input;
  double neg_hinge;      // negative smooth hinge
  double log_logistic;   // log sigmoid
};

struct LossGrid {
  std::vector<LossGridRow> rows;
  double max_abs_diff;
};

LossGrid loss_comparison_grid(double min_input, double max_input, double step);

void save_sweep_csv(const std::string& path, const SweepResult& result);
void save_sweep_summary_csv(const std::string& path, const SweepResult& result);
void save_loss_grid_csv(const std::string& path, const LossGrid& grid);

}  // namespace crowdrank
