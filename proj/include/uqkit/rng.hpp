#pragma once

#include <cstdint>
#include <random>

namespace uqkit {

/// Seeded random stream. Every stochastic routine in the library takes one of
/// these explicitly; there is no global generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() { return normal_(engine_); }
  double normal(double mean, double std) { return mean + std * normal_(engine_); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Seed for sub-stream `index` of `master`. Stable under changes to the number
/// of streams, so adding trials never reshuffles earlier ones.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace uqkit
