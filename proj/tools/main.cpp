#include <charconv>
#include <clocale>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "crowdrank/baselines.hpp"
#include "crowdrank/core.hpp"
#include "crowdrank/crowd.hpp"
#include "crowdrank/datasets.hpp"
#include "crowdrank/eval.hpp"
#include "crowdrank/serialize.hpp"
#include "crowdrank/vrjam.hpp"

namespace {

using namespace crowdrank;

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t pos = text.find(',', start);
    if (pos == std::string::npos) pos = text.size();
    const std::string tok = text.substr(start, pos - start);
    double v = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) {
      throw InvalidInput("bad number '" + tok + "' in list '" + text + "'");
    }
    out.push_back(v);
    start = pos + 1;
  }
  return out;
}

std::vector<std::size_t> parse_count_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_double_list(text)) {
    auto n = static_cast<std::size_t>(v);
    if (static_cast<double>(n) != v) {
      throw InvalidInput("expected integers in list '" + text + "'");
    }
    out.push_back(n);
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(path + ": cannot open file");
  }
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

void ensure_parent_dir(const std::string& path) {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::filesystem::create_directories(parent);
  }
}

// --config JSON: keys are long flag names without the leading dashes and use
// the same textual format as the flag values. Flags given on the command
// line win.
class JsonBinder {
 public:
  explicit JsonBinder(CLI::App* sub) : sub_(sub) {}

  template <typename T>
  void bind(const std::string& flag, T& target) {
    entries_.emplace_back(flag, [&target](const nlohmann::json& v) {
      target = v.get<T>();
    });
  }

  void apply(const nlohmann::json& cfg) {
    if (!cfg.is_object()) {
      throw InvalidInput("config file must hold a json object");
    }
    for (const auto& [flag, assign] : entries_) {
      const std::string key = flag.substr(2);
      if (!cfg.contains(key)) continue;
      if (sub_->get_option(flag)->count() > 0) continue;
      try {
        assign(cfg[key]);
      } catch (const nlohmann::json::exception&) {
        throw InvalidInput("config key '" + key + "' has the wrong type");
      }
    }
    for (const auto& [key, value] : cfg.items()) {
      (void)value;
      bool known = false;
      for (const auto& [flag, assign] : entries_) {
        (void)assign;
        if (flag.substr(2) == key) {
          known = true;
          break;
        }
      }
      if (!known) {
        throw InvalidInput("config key '" + key + "' matches no flag");
      }
    }
  }

 private:
  CLI::App* sub_;
  std::vector<std::pair<std::string, std::function<void(const nlohmann::json&)>>>
      entries_;
};

struct FitFlags {
  std::uint64_t seed = 0;
  std::size_t max_iter = 200;
  double tol = 1e-5;
  double learning_rate = 0.1;
  std::size_t train_max_iter = 500;
  double train_tol = 1e-6;
  double l2 = 0.0;
  std::string clusters = "auto";
  double cluster_threshold = 0.5;
  std::size_t max_clusters = 8;
  bool no_standardize = false;
  std::string config;

  EmConfig em() const {
    EmConfig cfg;
    cfg.train.learning_rate = learning_rate;
    cfg.train.max_iterations = train_max_iter;
    cfg.train.cost_tolerance = train_tol;
    cfg.train.l2_penalty = l2;
    cfg.train.seed = seed;
    cfg.max_em_iterations = max_iter;
    cfg.param_tolerance = tol;
    if (clusters == "auto") {
      cfg.clusters = 0;
    } else {
      std::size_t n = 0;
      auto [p, ec] =
          std::from_chars(clusters.data(), clusters.data() + clusters.size(), n);
      if (ec != std::errc() || p != clusters.data() + clusters.size() || n < 1) {
        throw InvalidInput("--clusters takes 'auto' or a positive integer");
      }
      cfg.clusters = n;
    }
    cfg.cluster_threshold_ratio = cluster_threshold;
    cfg.max_clusters = max_clusters;
    return cfg;
  }
};

void add_fit_flags(CLI::App* sub, FitFlags& f, JsonBinder& binder) {
  sub->add_option("--seed", f.seed, "Seed for every random draw");
  sub->add_option("--max-iter", f.max_iter, "EM iteration cap (jam/vrjam)");
  sub->add_option("--tol", f.tol, "EM parameter-change tolerance");
  sub->add_option("--learning-rate", f.learning_rate, "Trainer step size");
  sub->add_option("--train-max-iter", f.train_max_iter, "Trainer iteration cap");
  sub->add_option("--train-tol", f.train_tol, "Trainer cost-change tolerance");
  sub->add_option("--l2", f.l2, "Trainer l2 penalty");
  sub->add_option("--clusters", f.clusters,
                  "'auto' or a fixed cluster count (vrjam)");
  sub->add_option("--cluster-threshold", f.cluster_threshold,
                  "Auto-selection min/median centroid distance ratio");
  sub->add_option("--max-clusters", f.max_clusters, "Auto-selection cap");
  sub->add_flag("--no-standardize", f.no_standardize,
                "Use raw feature columns");
  sub->add_option("--config", f.config,
                  "JSON file of flag values; explicit flags win");
  binder.bind("--seed", f.seed);
  binder.bind("--max-iter", f.max_iter);
  binder.bind("--tol", f.tol);
  binder.bind("--learning-rate", f.learning_rate);
  binder.bind("--train-max-iter", f.train_max_iter);
  binder.bind("--train-tol", f.train_tol);
  binder.bind("--l2", f.l2);
  binder.bind("--clusters", f.clusters);
  binder.bind("--cluster-threshold", f.cluster_threshold);
  binder.bind("--max-clusters", f.max_clusters);
  binder.bind("--no-standardize", f.no_standardize);
}

void apply_config(const FitFlags& f, JsonBinder& binder) {
  if (f.config.empty()) return;
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(read_text_file(f.config));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(f.config + ": " + e.what());
  }
  binder.apply(cfg);
}

struct LoadedItems {
  ItemTable items;
  std::vector<double> scores;
  bool has_scores = false;
};

bool sniff_semicolons(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(path + ": cannot open file");
  }
  std::string line;
  std::getline(in, line);
  return line.find(';') != std::string::npos;
}

LoadedItems load_items_any(const std::string& path,
                           const std::string& scores_col,
                           const std::string& scores_path) {
  LoadedItems out;
  if (sniff_semicolons(path)) {
    WineTable wine =
        load_wine_csv(path, scores_col.empty() ? "quality" : scores_col);
    out.items = std::move(wine.items);
    out.scores = std::move(wine.quality);
    out.has_scores = true;
  } else {
    if (!scores_col.empty()) {
      throw InvalidInput(
          "--scores-col needs a semicolon-separated table; use --scores with "
          "plain item files");
    }
    out.items = load_items_csv(path);
    if (!scores_path.empty()) {
      out.scores = load_scores_csv(scores_path, out.items);
      out.has_scores = true;
    }
  }
  return out;
}

void save_diagnostics_csv(const std::string& path,
                          const EmDiagnostics& diagnostics) {
  std::ostringstream out;
  out << "iteration,L,M,H,delta\n";
  for (std::size_t n = 0; n < diagnostics.records.size(); ++n) {
    const auto& rec = diagnostics.records[n];
    out << (n + 1) << ',' << format_double(rec.log_likelihood) << ','
        << format_double(rec.surrogate) << ',' << format_double(rec.entropy)
        << ',' << format_double(rec.param_delta) << '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw ParseError(path + ": cannot open file for writing");
  }
  file << out.str();
}

std::string reliability_summary(const std::vector<std::string>& ids,
                                const std::vector<double>& r) {
  std::string out;
  char buf[64];
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (k > 0) out += ',';
    std::snprintf(buf, sizeof(buf), "%s:%.4f", ids[k].c_str(), r[k]);
    out += buf;
  }
  return out;
}

struct FuseArgs {
  std::string items;
  std::string annotations;
  std::string method;
  std::string out;
  FitFlags fit;
};

int run_fuse(const FuseArgs& a) {
  LoadedItems loaded = load_items_any(a.items, "", "");
  ItemTable items = a.fit.no_standardize
                        ? std::move(loaded.items)
                        : standardize_features(loaded.items).items;
  AnnotationSet ann = load_annotations_csv(a.annotations, items);
  std::filesystem::create_directories(a.out);
  const auto out_path = [&](const char* name) {
    return (std::filesystem::path(a.out) / name).string();
  };
  Matrix diffs = pair_differences(items, ann.pairs);
  int code = 0;

  if (a.method == "mv") {
    LabelColumn labels = majority_vote(ann, a.fit.seed);
    save_labels_csv(out_path("labels.csv"), labels, ann.pairs, items);
    std::cout << "method=mv pairs=" << ann.num_pairs()
              << " annotators=" << ann.num_annotators() << "\n";
  } else if (a.method == "iam") {
    EmConfig em = a.fit.em();
    IamModel model = iam_train(ann, items, em.train);
    LabelColumn labels = iam_fuse(model, items, ann.pairs);
    save_labels_csv(out_path("labels.csv"), labels, ann.pairs, items);
    std::ofstream(out_path("model.json"), std::ios::binary)
        << to_json_string(model);
    std::size_t iters = 0;
    for (const auto& w : model.rankers) {
      iters = std::max(iters, w.trained_iterations);
    }
    std::cout << "method=iam pairs=" << ann.num_pairs()
              << " annotators=" << ann.num_annotators()
              << " iterations=" << iters << "\n";
  } else if (a.method == "jam") {
    JamModel model = jam_fit(ann, items, a.fit.em(), a.fit.seed);
    LabelColumn labels = jam_infer(model, ann, diffs);
    save_labels_csv(out_path("labels.csv"), labels, ann.pairs, items);
    std::ofstream(out_path("model.json"), std::ios::binary)
        << to_json_string(model);
    save_diagnostics_csv(out_path("diagnostics.csv"), model.diagnostics);
    std::cout << "method=jam pairs=" << ann.num_pairs()
              << " iterations=" << model.iterations
              << " converged=" << (model.converged ? "yes" : "no") << " r="
              << reliability_summary(ann.annotator_ids, model.r) << "\n";
    if (!model.converged) code = 3;
  } else if (a.method == "vrjam") {
    VrjamModel model = vrjam_fit(ann, items, a.fit.em(), a.fit.seed);
    LabelColumn labels = vrjam_infer(model, ann, diffs);
    save_labels_csv(out_path("labels.csv"), labels, ann.pairs, items);
    std::ofstream(out_path("model.json"), std::ios::binary)
        << to_json_string(model);
    save_diagnostics_csv(out_path("diagnostics.csv"), model.diagnostics);
    std::vector<double> means(model.reliability.rows());
    for (std::size_t k = 0; k < model.reliability.rows(); ++k) {
      double m = 0.0;
      for (std::size_t d = 0; d < model.reliability.cols(); ++d) {
        m += model.reliability[k][d];
      }
      means[k] = m / static_cast<double>(model.reliability.cols());
    }
    std::cout << "method=vrjam pairs=" << ann.num_pairs()
              << " iterations=" << model.iterations
              << " converged=" << (model.converged ? "yes" : "no")
              << " D=" << model.clusters.num_clusters() << " r="
              << reliability_summary(ann.annotator_ids, means) << "\n";
    if (!model.converged) code = 3;
  } else {
    throw InvalidInput("unknown method '" + a.method +
                       "' (want mv, iam, jam, or vrjam)");
  }
  return code;
}

struct SimArgs {
  std::string items;
  std::string scores_col;
  std::string scores;
  std::string b;
  std::string region_spec;
  double alpha = 1.0;
  std::string out;
  std::string truth_out;
  FitFlags fit;
};

std::string derive_truth_path(const std::string& out) {
  std::filesystem::path p(out);
  const std::string ext = p.extension().string();
  if (ext.empty()) {
    return out + ".truth.csv";
  }
  p.replace_extension();
  return p.string() + ".truth" + ext;
}

int run_simulate(const SimArgs& a) {
  if (a.b.empty() == a.region_spec.empty()) {
    throw InvalidInput("give exactly one of --b or --region-spec");
  }
  LoadedItems loaded = load_items_any(a.items, a.scores_col, a.scores);
  if (!loaded.has_scores) {
    throw InvalidInput(
        "no ground scores: use a table with a score column or pass --scores");
  }
  ItemTable items = a.fit.no_standardize
                        ? std::move(loaded.items)
                        : standardize_features(loaded.items).items;
  PairIndex pairs = build_pair_index(items, &loaded.scores);
  LabelColumn truth = ground_truth_labels(pairs, loaded.scores);
  Matrix diffs = pair_differences(items, pairs);

  CrowdSpec spec;
  spec.alpha = a.alpha;
  spec.seed = a.fit.seed;
  if (!a.b.empty()) {
    spec.mode = CrowdMode::kUniform;
    spec.b = parse_double_list(a.b);
  } else {
    spec.mode = CrowdMode::kRegion;
    RegionSpec region = region_spec_from_json(read_text_file(a.region_spec));
    spec.regions = std::move(region.regions);
    spec.B = std::move(region.B);
  }
  AnnotationSet ann = generate_crowd(truth, spec, pairs, diffs);

  ensure_parent_dir(a.out);
  save_annotations_csv(a.out, ann, items);
  const std::string truth_path =
      a.truth_out.empty() ? derive_truth_path(a.out) : a.truth_out;
  ensure_parent_dir(truth_path);
  save_labels_csv(truth_path, truth, pairs, items);
  std::cout << "simulated annotators=" << ann.num_annotators()
            << " pairs=" << ann.num_pairs() << " alpha=" << format_double(a.alpha)
            << " annotations=" << a.out << " truth=" << truth_path << "\n";
  return 0;
}

struct SweepArgs {
  std::string kind;
  std::string items;
  std::string scores_col;
  std::string scores;
  std::string grid;
  std::string b = "0.05,0.1,0.15,0.2,0.25,0.3";
  std::size_t reps = 5;
  std::string out;
  FitFlags fit;
};

int run_sweep(const SweepArgs& a) {
  LoadedItems loaded = load_items_any(a.items, a.scores_col, a.scores);
  if (!loaded.has_scores) {
    throw InvalidInput(
        "no ground scores: use a table with a score column or pass --scores");
  }
  SweepConfig cfg;
  cfg.em = a.fit.em();
  cfg.reps = a.reps;
  cfg.standardize = !a.fit.no_standardize;

  SweepResult result;
  if (a.kind == "noise") {
    result = run_noise_sweep(loaded.items, loaded.scores, parse_double_list(a.b),
                             parse_double_list(a.grid), cfg, a.fit.seed);
  } else if (a.kind == "annotators") {
    result = run_annotator_sweep(loaded.items, loaded.scores,
                                 parse_count_list(a.grid), cfg, a.fit.seed);
  } else {
    throw InvalidInput("unknown sweep kind '" + a.kind +
                       "' (want noise or annotators)");
  }
  std::filesystem::create_directories(a.out);
  const auto sweep_path = (std::filesystem::path(a.out) / "sweep.csv").string();
  const auto summary_path =
      (std::filesystem::path(a.out) / "summary.csv").string();
  save_sweep_csv(sweep_path, result);
  save_sweep_summary_csv(summary_path, result);
  std::cout << "sweep kind=" << a.kind << " cells=" << result.grid.size()
            << " summary-rows=" << result.summary.size() << " out=" << a.out
            << "\n";
  return 0;
}

struct LossArgs {
  double min = -6.0;
  double max = 6.0;
  double step = 0.01;
  std::string out;
};

int run_compare_losses(const LossArgs& a) {
  LossGrid grid = loss_comparison_grid(a.min, a.max, a.step);
  ensure_parent_dir(a.out);
  save_loss_grid_csv(a.out, grid);
  std::cout << "rows=" << grid.rows.size()
            << " max_abs_diff=" << format_double(grid.max_abs_diff)
            << " out=" << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{
      "crowdrank: infer latent pairwise rankings from noisy annotator votes"};
  app.require_subcommand(1);

  FuseArgs fuse;
  CLI::App* fuse_cmd =
      app.add_subcommand("fuse", "Fuse annotations into one label set");
  fuse_cmd->add_option("--items", fuse.items, "Item feature table")->required();
  fuse_cmd->add_option("--annotations", fuse.annotations, "Annotation CSV")
      ->required();
  fuse_cmd->add_option("--method", fuse.method, "mv, iam, jam, or vrjam")
      ->required();
  fuse_cmd->add_option("--out", fuse.out, "Output directory")->required();
  JsonBinder fuse_binder(fuse_cmd);
  add_fit_flags(fuse_cmd, fuse.fit, fuse_binder);
  fuse_binder.bind("--items", fuse.items);
  fuse_binder.bind("--annotations", fuse.annotations);
  fuse_binder.bind("--method", fuse.method);
  fuse_binder.bind("--out", fuse.out);

  SimArgs sim;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "Draw a synthetic annotator crowd");
  sim_cmd->add_option("--items", sim.items, "Item feature table")->required();
  sim_cmd->add_option("--scores-col", sim.scores_col,
                      "Score column name in a semicolon table");
  sim_cmd->add_option("--scores", sim.scores, "id,score CSV for plain tables");
  sim_cmd->add_option("--b", sim.b, "Comma list of flip probabilities");
  sim_cmd->add_option("--region-spec", sim.region_spec,
                      "JSON file with centroids and per-region B");
  sim_cmd->add_option("--alpha", sim.alpha, "Noise multiplier");
  sim_cmd->add_option("--out", sim.out, "Annotations CSV path")->required();
  sim_cmd->add_option("--truth-out", sim.truth_out,
                      "Truth CSV path (default: <out>.truth.csv)");
  JsonBinder sim_binder(sim_cmd);
  add_fit_flags(sim_cmd, sim.fit, sim_binder);
  sim_binder.bind("--items", sim.items);
  sim_binder.bind("--scores-col", sim.scores_col);
  sim_binder.bind("--scores", sim.scores);
  sim_binder.bind("--b", sim.b);
  sim_binder.bind("--region-spec", sim.region_spec);
  sim_binder.bind("--alpha", sim.alpha);
  sim_binder.bind("--out", sim.out);
  sim_binder.bind("--truth-out", sim.truth_out);

  SweepArgs sweep;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Grid experiments over a synthetic crowd");
  sweep_cmd->add_option("--kind", sweep.kind, "noise or annotators")
      ->required();
  sweep_cmd->add_option("--items", sweep.items, "Item feature table")
      ->required();
  sweep_cmd->add_option("--scores-col", sweep.scores_col,
                        "Score column name in a semicolon table");
  sweep_cmd->add_option("--scores", sweep.scores,
                        "id,score CSV for plain tables");
  sweep_cmd->add_option("--grid", sweep.grid,
                        "Comma list: alphas (noise) or counts (annotators)")
      ->required();
  sweep_cmd->add_option("--b", sweep.b,
                        "Base flip probabilities for the noise sweep");
  sweep_cmd->add_option("--reps", sweep.reps, "Crowd draws per grid point");
  sweep_cmd->add_option("--out", sweep.out, "Output directory")->required();
  JsonBinder sweep_binder(sweep_cmd);
  add_fit_flags(sweep_cmd, sweep.fit, sweep_binder);
  sweep_binder.bind("--kind", sweep.kind);
  sweep_binder.bind("--items", sweep.items);
  sweep_binder.bind("--scores-col", sweep.scores_col);
  sweep_binder.bind("--scores", sweep.scores);
  sweep_binder.bind("--grid", sweep.grid);
  sweep_binder.bind("--b", sweep.b);
  sweep_binder.bind("--reps", sweep.reps);
  sweep_binder.bind("--out", sweep.out);

  LossArgs loss;
  CLI::App* loss_cmd = app.add_subcommand(
      "compare-losses", "Tabulate negative smooth hinge against log sigmoid");
  loss_cmd->add_option("--min", loss.min, "Grid start");
  loss_cmd->add_option("--max", loss.max, "Grid end");
  loss_cmd->add_option("--step", loss.step, "Grid step");
  loss_cmd->add_option("--out", loss.out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (fuse_cmd->parsed()) {
      apply_config(fuse.fit, fuse_binder);
      return run_fuse(fuse);
    }
    if (sim_cmd->parsed()) {
      apply_config(sim.fit, sim_binder);
      return run_simulate(sim);
    }
    if (sweep_cmd->parsed()) {
      apply_config(sweep.fit, sweep_binder);
      return run_sweep(sweep);
    }
    if (loss_cmd->parsed()) {
      return run_compare_losses(loss);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
