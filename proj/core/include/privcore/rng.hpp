#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace privcore {

// Named sub-streams derived from one root seed. Every random draw in the
// library comes from exactly one of these, so a run is replayable from the
// root seed alone. Values are part of the on-disk reproducibility contract;
// never renumber.
enum class Stream : std::uint64_t {
  kTrueModels = 1,   // coefficients of the generating y/z models
  kFeatures = 2,     // feature matrix draws
  kNoise = 3,        // label noise
  kPlant = 4,        // planted secret model
  kShuffle = 5,      // mini-batch order during training
  kSplit = 6,        // train/test split
  kRandomScores = 7, // "random" core-set construction
  kClassCenters = 8, // hierarchical generator
  kSample = 10,      // random baseline subsets
};

// SplitMix64 finaliser. Used for seed derivation only.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// derive_seed(root, s) = splitmix64(root ^ splitmix64(s)). Distinct streams of
// the same root are decorrelated; derive_seed is itself a pure function.
std::uint64_t derive_seed(std::uint64_t root, Stream stream) noexcept;
std::uint64_t derive_seed(std::uint64_t root, Stream stream, std::uint64_t index) noexcept;

// mt19937_64 engine with distribution transforms implemented here rather than
// via <random> distributions, whose output differs between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  // Box-Muller; the second variate of each pair is cached.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  double exponential(double rate);
  // Unbiased integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  std::optional<double> cached_normal_;
};

}  // namespace privcore
