#pragma once

#include <cstdint>
#include <string>

#include "crowdrank/datasets.hpp"
#include "crowdrank/types.hpp"

namespace crowdtest {

// 200-item synthetic table shaped like the red-wine data: 11 correlated
// features on realistic scales driven by three latent factors, plus an
// eight-level integer quality column with a fixed histogram. The latent
// score carries enough noise that a linear ranker tops out well below
// perfect accuracy.
crowdrank::WineTable desk_wine(std::uint64_t seed = 7);

// n items on a line in 2-d feature space, scores equal to the coordinate:
// every pair is linearly separable with margin.
crowdrank::WineTable separable_line(std::size_t n, std::uint64_t seed);

// The 10-item instance bundled as CSV under tests/data.
crowdrank::WineTable fixture10();
crowdrank::AnnotationSet fixture10_annotations(const crowdrank::ItemTable& items);

// Test-process plumbing.
std::string fixture_dir();
std::string cli_path();
std::string fresh_dir(const std::string& tag);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& body);

// Runs the CLI with `args` appended, captures stdout+stderr, returns the
// exit code.
int run_cli(const std::string& args, std::string* output);

}  // namespace crowdtest
