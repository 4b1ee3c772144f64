#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "crowdrank/datasets.hpp"
#include "crowdrank/serialize.hpp"
#include "support/fixture.hpp"

using namespace crowdrank;
using crowdtest::fixture_dir;
using crowdtest::fresh_dir;
using crowdtest::read_file;
using crowdtest::run_cli;
using crowdtest::write_file;

namespace {

std::string items_csv() { return fixture_dir() + "/fixture10_items.csv"; }
std::string ann_csv() { return fixture_dir() + "/fixture10_annotations.csv"; }
std::string scores_csv() { return fixture_dir() + "/fixture10_scores.csv"; }

std::size_t line_count(const std::string& body) {
  std::size_t n = 0;
  for (char c : body)
    if (c == '\n') ++n;
  return n;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("help exits cleanly and lists the subcommands") {
  std::string out;
  CHECK(run_cli("--help", &out) == 0);
  CHECK(contains(out, "fuse"));
  CHECK(contains(out, "simulate"));
  CHECK(contains(out, "sweep"));
  CHECK(contains(out, "compare-losses"));
}

TEST_CASE("a missing subcommand or flag is a usage error") {
  std::string out;
  CHECK(run_cli("", &out) == 2);
  CHECK(run_cli("fuse --items x.csv", &out) == 2);
  CHECK(run_cli("fuse --items x.csv --annotations y.csv --method mv", &out) == 2);
}

TEST_CASE("majority vote writes labels for every pair") {
  const auto dir = fresh_dir("cli_mv");
  std::string out;
  const int code = run_cli("fuse --items " + items_csv() + " --annotations " +
                               ann_csv() + " --method mv --out " + dir,
                           &out);
  CHECK(code == 0);
  CHECK(contains(out, "method=mv pairs=45 annotators=3"));
  const auto labels = read_file(dir + "/labels.csv");
  CHECK(line_count(labels) == 46);
  CHECK(labels.rfind("item_i,item_j,pref\n", 0) == 0);
}

TEST_CASE("repeated runs with one seed write identical bytes") {
  const auto dir_a = fresh_dir("cli_det_a");
  const auto dir_b = fresh_dir("cli_det_b");
  std::string out;
  const std::string base = "fuse --items " + items_csv() + " --annotations " +
                           ann_csv() + " --method jam --tol 1e-3 --seed 11 --out ";
  CHECK(run_cli(base + dir_a, &out) == 0);
  CHECK(run_cli(base + dir_b, &out) == 0);
  for (const char* name : {"/labels.csv", "/model.json", "/diagnostics.csv"}) {
    CHECK(read_file(dir_a + name) == read_file(dir_b + name));
  }
}

TEST_CASE("non-convergence still writes outputs and signals exit 3") {
  const auto dir = fresh_dir("cli_jam_nc");
  std::string out;
  const int code = run_cli("fuse --items " + items_csv() + " --annotations " +
                               ann_csv() + " --method jam --seed 42 --out " + dir,
                           &out);
  CHECK(code == 3);
  CHECK(contains(out, "converged=no"));

  const auto model = jam_model_from_json(read_file(dir + "/model.json"));
  CHECK_FALSE(model.converged);
  REQUIRE(model.r.size() == 3);
  // Generated with flip rates 0.1 / 0.2 / 0.3.
  CHECK(model.r[0] < model.r[1]);
  CHECK(model.r[1] < model.r[2]);
  for (std::size_t k = 0; k < 3; ++k) {
    const double target = 0.1 * static_cast<double>(k + 1);
    CHECK(std::abs(model.r[k] - target) < 0.1);
  }
  const auto diag = read_file(dir + "/diagnostics.csv");
  CHECK(diag.rfind("iteration,L,M,H,delta\n", 0) == 0);
  CHECK(line_count(diag) == 1 + model.iterations);
}

TEST_CASE("a relaxed tolerance reaches convergence and exit 0") {
  const auto dir = fresh_dir("cli_jam_ok");
  std::string out;
  const int code =
      run_cli("fuse --items " + items_csv() + " --annotations " + ann_csv() +
                  " --method jam --tol 1e-3 --seed 42 --out " + dir,
              &out);
  CHECK(code == 0);
  CHECK(contains(out, "converged=yes"));
  CHECK(jam_model_from_json(read_file(dir + "/model.json")).converged);
}

TEST_CASE("cluster-wise fusion reports the cluster count") {
  const auto dir = fresh_dir("cli_vrjam");
  std::string out;
  const int code =
      run_cli("fuse --items " + items_csv() + " --annotations " + ann_csv() +
                  " --method vrjam --clusters 2 --tol 1e-3 --seed 7 --out " + dir,
              &out);
  CHECK(code == 0);
  CHECK(contains(out, "method=vrjam"));
  CHECK(contains(out, "D=2"));
  const auto model = vrjam_model_from_json(read_file(dir + "/model.json"));
  CHECK(model.reliability.cols() == 2);
  CHECK(model.clusters.num_clusters() == 2);
}

TEST_CASE("iam fusion writes its per-annotator model") {
  const auto dir = fresh_dir("cli_iam");
  std::string out;
  const int code = run_cli("fuse --items " + items_csv() + " --annotations " +
                               ann_csv() + " --method iam --out " + dir,
                           &out);
  CHECK(code == 0);
  CHECK(contains(out, "method=iam"));
  const auto body = read_file(dir + "/model.json");
  CHECK(contains(body, "\"annotators\""));
  CHECK(contains(body, "\"a3\""));
}

TEST_CASE("validation problems exit with code 2") {
  const auto dir = fresh_dir("cli_errs");
  std::string out;

  CHECK(run_cli("fuse --items " + items_csv() + " --annotations " + ann_csv() +
                    " --method nope --out " + dir,
                &out) == 2);
  CHECK(contains(out, "error:"));

  CHECK(run_cli("fuse --items /nonexistent.csv --annotations " + ann_csv() +
                    " --method mv --out " + dir,
                &out) == 2);

  const auto partial = dir + "/partial.csv";
  write_file(partial,
             "annotator,item_i,item_j,pref\n"
             "a1,item0,item1,1\n"
             "a2,item0,item1,0\na2,item0,item2,1\n");
  CHECK(run_cli("fuse --items " + items_csv() + " --annotations " + partial +
                    " --method mv --out " + dir,
                &out) == 2);
  CHECK(contains(out, "incomplete annotation coverage"));

  CHECK(run_cli("fuse --items " + items_csv() + " --annotations " + ann_csv() +
                    " --method vrjam --clusters zero --out " + dir,
                &out) == 2);
}

TEST_CASE("simulate draws a crowd and a matching truth file") {
  const auto dir = fresh_dir("cli_sim");
  std::string out;
  const int code = run_cli("simulate --items " + items_csv() + " --scores " +
                               scores_csv() + " --b 0.0,0.3 --seed 5 --out " +
                               dir + "/sim.csv",
                           &out);
  CHECK(code == 0);
  CHECK(contains(out, "simulated annotators=2 pairs=45"));
  CHECK(contains(out, "truth=" + dir + "/sim.truth.csv"));

  const auto items = load_items_csv(items_csv());
  const auto ann = load_annotations_csv(dir + "/sim.csv", items);
  REQUIRE(ann.num_annotators() == 2);
  const auto truth = load_labels_csv(dir + "/sim.truth.csv", items, ann.pairs);
  // The first annotator is noise-free.
  CHECK(ann.columns[0] == truth);
}

TEST_CASE("alpha zero silences every annotator's noise") {
  const auto dir = fresh_dir("cli_sim_a0");
  std::string out;
  CHECK(run_cli("simulate --items " + items_csv() + " --scores " + scores_csv() +
                    " --b 0.4,0.4,0.4 --alpha 0 --seed 3 --out " + dir +
                    "/sim.csv",
                &out) == 0);
  const auto items = load_items_csv(items_csv());
  const auto ann = load_annotations_csv(dir + "/sim.csv", items);
  const auto truth = load_labels_csv(dir + "/sim.truth.csv", items, ann.pairs);
  for (const auto& col : ann.columns) CHECK(col == truth);
}

TEST_CASE("simulate demands exactly one noise description") {
  const auto dir = fresh_dir("cli_sim_excl");
  std::string out;
  CHECK(run_cli("simulate --items " + items_csv() + " --scores " + scores_csv() +
                    " --out " + dir + "/sim.csv",
                &out) == 2);
  const auto region = dir + "/region.json";
  write_file(region,
             "{\"centroids\": [[0.0, 0.0]], \"B\": [[0.1]]}\n");
  CHECK(run_cli("simulate --items " + items_csv() + " --scores " + scores_csv() +
                    " --b 0.1 --region-spec " + region + " --out " + dir +
                    "/sim.csv",
                &out) == 2);
}

TEST_CASE("simulate with a region file applies regional noise") {
  const auto dir = fresh_dir("cli_sim_region");
  const auto region = dir + "/region.json";
  // Standardized fixture features are near the unit scale; one far centroid
  // catches nothing.
  write_file(region,
             "{\"centroids\": [[0.0, 0.0], [50.0, 50.0]],"
             " \"B\": [[0.0, 0.5], [0.2, 0.2]]}\n");
  std::string out;
  CHECK(run_cli("simulate --items " + items_csv() + " --scores " + scores_csv() +
                    " --region-spec " + region + " --seed 9 --out " + dir +
                    "/sim.csv",
                &out) == 0);
  const auto items = load_items_csv(items_csv());
  const auto ann = load_annotations_csv(dir + "/sim.csv", items);
  const auto truth = load_labels_csv(dir + "/sim.truth.csv", items, ann.pairs);
  // Annotator one is perfect inside the only populated region.
  CHECK(ann.columns[0] == truth);

  const auto bad = dir + "/bad.json";
  write_file(bad, "{\"centroids\": [[0.0, 0.0]], \"B\": [[0.1, 0.2]]}\n");
  CHECK(run_cli("simulate --items " + items_csv() + " --scores " + scores_csv() +
                    " --region-spec " + bad + " --out " + dir + "/sim.csv",
                &out) == 2);
}

TEST_CASE("simulate is byte-deterministic per seed") {
  const auto dir = fresh_dir("cli_sim_det");
  std::string out;
  const std::string base = "simulate --items " + items_csv() + " --scores " +
                           scores_csv() + " --b 0.2,0.3 --seed 21 --out ";
  CHECK(run_cli(base + dir + "/one.csv", &out) == 0);
  CHECK(run_cli(base + dir + "/two.csv", &out) == 0);
  CHECK(read_file(dir + "/one.csv") == read_file(dir + "/two.csv"));
  CHECK(read_file(dir + "/one.truth.csv") == read_file(dir + "/two.truth.csv"));
}

TEST_CASE("noise sweep writes a grid and a summary") {
  const auto dir = fresh_dir("cli_sweep_noise");
  std::string out;
  const int code =
      run_cli("sweep --kind noise --items " + items_csv() + " --scores " +
                  scores_csv() + " --grid 1.0,2.0 --b 0.1,0.2,0.3 --reps 2" +
                  " --max-iter 15 --seed 4 --out " + dir,
              &out);
  CHECK(code == 0);
  CHECK(contains(out, "cells=16"));
  const auto sweep = read_file(dir + "/sweep.csv");
  const auto summary = read_file(dir + "/summary.csv");
  CHECK(sweep.rfind("param,method,rep,accuracy\n", 0) == 0);
  CHECK(summary.rfind("param,method,reps,mean,std\n", 0) == 0);
  CHECK(line_count(sweep) == 1 + 16);
  CHECK(line_count(summary) == 1 + 8);
}

TEST_CASE("annotator sweep accepts a count grid") {
  const auto dir = fresh_dir("cli_sweep_k");
  std::string out;
  const int code = run_cli("sweep --kind annotators --items " + items_csv() +
                               " --scores " + scores_csv() +
                               " --grid 2,3 --reps 1 --max-iter 10 --out " + dir,
                           &out);
  CHECK(code == 0);
  const auto sweep = read_file(dir + "/sweep.csv");
  CHECK(line_count(sweep) == 1 + 8);
  CHECK(run_cli("sweep --kind wrong --items " + items_csv() + " --scores " +
                    scores_csv() + " --grid 2 --out " + dir,
                &out) == 2);
}

TEST_CASE("sweeps repeat byte for byte") {
  const auto dir_a = fresh_dir("cli_sweep_det_a");
  const auto dir_b = fresh_dir("cli_sweep_det_b");
  std::string out;
  const std::string base = "sweep --kind noise --items " + items_csv() +
                           " --scores " + scores_csv() +
                           " --grid 1.5 --b 0.1,0.2 --reps 2 --max-iter 8" +
                           " --seed 10 --out ";
  CHECK(run_cli(base + dir_a, &out) == 0);
  CHECK(run_cli(base + dir_b, &out) == 0);
  CHECK(read_file(dir_a + "/sweep.csv") == read_file(dir_b + "/sweep.csv"));
  CHECK(read_file(dir_a + "/summary.csv") == read_file(dir_b + "/summary.csv"));
}

TEST_CASE("loss comparison covers the requested grid") {
  const auto dir = fresh_dir("cli_losses");
  std::string out;
  const int code = run_cli("compare-losses --out " + dir + "/grid.csv", &out);
  CHECK(code == 0);
  CHECK(contains(out, "rows=1201"));
  const auto body = read_file(dir + "/grid.csv");
  CHECK(body.rfind("input,neg_hinge,log_logistic\n", 0) == 0);
  CHECK(line_count(body) == 1 + 1201);
  CHECK(run_cli("compare-losses --min 2 --max -2 --out " + dir + "/bad.csv",
                &out) == 2);
}

TEST_CASE("config files fill unset flags and explicit flags win") {
  const auto dir = fresh_dir("cli_config");
  std::string out;
  const auto cfg = dir + "/cfg.json";
  write_file(cfg, "{\"seed\": 21, \"b\": \"0.2,0.3\"}\n");

  const std::string plain = "simulate --items " + items_csv() + " --scores " +
                            scores_csv() + " --b 0.2,0.3 --seed 21 --out " +
                            dir + "/plain.csv";
  CHECK(run_cli(plain, &out) == 0);

  CHECK(run_cli("simulate --items " + items_csv() + " --scores " + scores_csv() +
                    " --config " + cfg + " --out " + dir + "/fromcfg.csv",
                &out) == 0);
  CHECK(read_file(dir + "/fromcfg.csv") == read_file(dir + "/plain.csv"));

  // A flag on the command line overrides the config value.
  CHECK(run_cli("simulate --items " + items_csv() + " --scores " + scores_csv() +
                    " --config " + cfg + " --seed 99 --out " + dir +
                    "/override.csv",
                &out) == 0);
  CHECK(read_file(dir + "/override.csv") != read_file(dir + "/plain.csv"));

  const auto bad = dir + "/bad.json";
  write_file(bad, "{\"sed\": 21}\n");
  CHECK(run_cli("simulate --items " + items_csv() + " --scores " + scores_csv() +
                    " --b 0.1 --config " + bad + " --out " + dir + "/x.csv",
                &out) == 2);
  CHECK(contains(out, "matches no flag"));
}
