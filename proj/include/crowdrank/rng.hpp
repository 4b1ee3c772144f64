#pragma once

#include <cstdint>

namespace crowdrank::rng {

// cbrng64/v1: counter-based generator built from three chained SplitMix64
// finalizer rounds over (seed, stream, counter). Every draw is addressable
// directly, so generation order and thread count cannot change results.

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t word(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t counter) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ stream);
  h = mix64(h ^ counter);
  return h;
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t counter) {
  return static_cast<double>(word(seed, stream, counter) >> 11) * 0x1.0p-53;
}

// Stream ids. Purposes get disjoint streams so one seed may safely be
// reused across pipeline stages.
inline constexpr std::uint64_t kMvTie = 0;      // counter = pair position
inline constexpr std::uint64_t kInitW = 1;      // counter = weight dimension
inline constexpr std::uint64_t kInitR = 2;      // counter = annotator*D + cluster
inline constexpr std::uint64_t kInferTie = 3;   // counter = pair position
inline constexpr std::uint64_t kKmeans = 4;     // sequential counter
inline constexpr std::uint64_t kCrowdBase = 16; // annotator k -> stream 16+k, counter = pair position

}  // namespace crowdrank::rng
