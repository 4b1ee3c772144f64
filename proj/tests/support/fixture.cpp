#include "support/fixture.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "crowdrank/core.hpp"
#include "crowdrank/crowd.hpp"
#include "crowdrank/rng.hpp"

namespace crowdtest {

using namespace crowdrank;

namespace {

constexpr std::uint64_t kFxLatent = 100;
constexpr std::uint64_t kFxFeature = 101;
constexpr std::uint64_t kFxScore = 102;

double gauss(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const double u1 = 1.0 - rng::uniform01(seed, stream, 2 * counter);
  const double u2 = rng::uniform01(seed, stream, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

struct FeatureSpec {
  const char* name;
  double mean;
  double scale;
  double load[3];
};

constexpr FeatureSpec kFeatures[] = {
    {"fixed acidity", 8.32, 1.74, {0.7, 0.2, 0.0}},
    {"volatile acidity", 0.53, 0.18, {-0.6, 0.1, 0.2}},
    {"citric acid", 0.27, 0.19, {0.5, 0.0, -0.3}},
    {"residual sugar", 2.54, 1.41, {0.0, 0.4, 0.3}},
    {"chlorides", 0.087, 0.047, {-0.3, 0.2, 0.0}},
    {"free sulfur dioxide", 15.87, 10.46, {0.0, -0.5, 0.4}},
    {"total sulfur dioxide", 46.47, 32.9, {0.1, -0.7, 0.3}},
    {"density", 0.9967, 0.0019, {-0.2, 0.3, -0.5}},
    {"pH", 3.31, 0.15, {-0.4, -0.1, 0.3}},
    {"sulphates", 0.66, 0.17, {0.5, 0.0, 0.2}},
    {"alcohol", 10.42, 1.07, {0.6, -0.2, -0.4}},
};

constexpr double kFeatureNoise = 0.6;
constexpr double kScoreNoise = 0.55;
constexpr double kScoreBeta[3] = {1.0, 0.7, -0.5};
constexpr std::size_t kQualityCounts[] = {10, 20, 35, 40, 35, 30, 20, 10};

}  // namespace

WineTable desk_wine(std::uint64_t seed) {
  constexpr std::size_t n = 200;
  constexpr std::size_t d = std::size(kFeatures);

  std::vector<std::array<double, 3>> latent(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < 3; ++f) {
      latent[i][f] = gauss(seed, kFxLatent, i * 3 + f);
    }
  }

  std::vector<std::string> ids(n);
  Matrix attrs(n, d);
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = std::to_string(i);
    for (std::size_t k = 0; k < d; ++k) {
      const FeatureSpec& fs = kFeatures[k];
      double signal = 0.0;
      for (std::size_t f = 0; f < 3; ++f) {
        signal += fs.load[f] * latent[i][f];
      }
      signal += kFeatureNoise * gauss(seed, kFxFeature, i * d + k);
      attrs[i][k] = fs.mean + fs.scale * signal;
    }
    score[i] = kScoreNoise * gauss(seed, kFxScore, i);
    for (std::size_t f = 0; f < 3; ++f) {
      score[i] += kScoreBeta[f] * latent[i][f];
    }
  }

  std::vector<std::size_t> rank(n);
  std::iota(rank.begin(), rank.end(), 0);
  std::sort(rank.begin(), rank.end(),
            [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });

  std::vector<double> quality(n);
  std::size_t at = 0;
  for (std::size_t level = 0; level < std::size(kQualityCounts); ++level) {
    for (std::size_t c = 0; c < kQualityCounts[level]; ++c) {
      quality[rank[at++]] = static_cast<double>(level + 3);
    }
  }

  WineTable wine;
  wine.items = make_item_table(std::move(ids), std::move(attrs));
  wine.quality = std::move(quality);
  for (const auto& fs : kFeatures) {
    wine.feature_names.emplace_back(fs.name);
  }
  return wine;
}

WineTable separable_line(std::size_t n, std::uint64_t seed) {
  std::vector<std::string> ids(n);
  Matrix attrs(n, 2);
  std::vector<double> quality(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = "item" + std::to_string(i);
    const double jitter = rng::uniform01(seed, kFxFeature, i);
    attrs[i][0] = static_cast<double>(i) + 0.2 * jitter;
    attrs[i][1] = 1.0 - 0.1 * static_cast<double>(i);
    quality[i] = attrs[i][0];
  }
  WineTable wine;
  wine.items = make_item_table(std::move(ids), std::move(attrs));
  wine.quality = std::move(quality);
  return wine;
}

WineTable fixture10() {
  return separable_line(10, 19);
}

AnnotationSet fixture10_annotations(const ItemTable& items) {
  WineTable wine = fixture10();
  PairIndex pairs = build_pair_index(items, &wine.quality);
  LabelColumn truth = ground_truth_labels(pairs, wine.quality);
  Matrix diffs = pair_differences(items, pairs);
  CrowdSpec spec;
  spec.mode = CrowdMode::kUniform;
  spec.b = {0.1, 0.2, 0.3};
  spec.alpha = 1.0;
  spec.seed = 11;
  return generate_crowd(truth, spec, pairs, diffs);
}

std::string fixture_dir() {
  const char* dir = std::getenv("CROWDRANK_FIXTURE_DIR");
  if (dir == nullptr) {
    throw std::runtime_error("CROWDRANK_FIXTURE_DIR is not set");
  }
  return dir;
}

std::string cli_path() {
  const char* path = std::getenv("CROWDRANK_CLI");
  if (path == nullptr) {
    throw std::runtime_error("CROWDRANK_CLI is not set");
  }
  return path;
}

std::string fresh_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto base = std::filesystem::temp_directory_path() /
              ("crowdrank_" + tag + "_" + std::to_string(::getpid()) + "_" +
               std::to_string(counter.fetch_add(1)));
  std::filesystem::remove_all(base);
  std::filesystem::create_directories(base);
  return base.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  out << body;
}

int run_cli(const std::string& args, std::string* output) {
  const std::string cmd = cli_path() + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    throw std::runtime_error("popen failed for: " + cmd);
  }
  std::string captured;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) {
    captured.append(buf, got);
  }
  const int status = ::pclose(pipe);
  if (output != nullptr) {
    *output = std::move(captured);
  }
  if (WIFEXITED(status)) {
    return WEXITSTATUS(status);
  }
  return -1;
}

}  // namespace crowdtest
