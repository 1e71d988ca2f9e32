#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "uqkit/empirical.hpp"
#include "uqkit/rng.hpp"
#include "uqkit/significance.hpp"

namespace uqkit {

struct Normal {
  double mean = 0.0;
  double std = 1.0;
};

struct NormalMixture {
  std::vector<Normal> components;
  std::vector<double> weights;
};

struct Laplace {
  double location = 0.0;
  double scale = 1.0;
};

struct Rayleigh {
  double scale = 1.0;
};

using DistSpec = std::variant<Normal, NormalMixture, Laplace, Rayleigh>;

/// 0.75 N(0, 1.5^2) + 0.25 N(-0.5, 0.25^2).
NormalMixture default_mixture();

/// Throws on non-positive scales or mixture weights that are negative or do
/// not sum to one.
void validate(const DistSpec& spec);

/// Accepts "normal:MEAN:STD", "laplace:LOC:SCALE", "rayleigh:SCALE",
/// "mixture" (the default mixture) and "mixture:W:MEAN:STD[:W:MEAN:STD...]".
DistSpec parse_dist(std::string_view text);

/// Canonical text form; parse_dist(to_string(d)) reproduces d.
std::string to_string(const DistSpec& spec);

Sample sample_dist(const DistSpec& spec, std::size_t n, Rng& rng);

/// Which test to run and at what level. For ASO the threshold is tau and a
/// trial rejects when eps_min < tau; otherwise a trial rejects when the
/// p-value is below the threshold.
struct TestSpec {
  TestKind kind = TestKind::kAso;
  double threshold = kDefaultAsoThreshold;
  AsoOptions aso;
  std::size_t resamples = 1000;  // bootstrap and permutation tests
};

struct ErrorRateReport {
  TestKind test = TestKind::kAso;
  std::string dist;  // "A" for type I, "A/B" for type II
  bool type2 = false;
  std::size_t n = 0;
  std::size_t trials = 0;
  double threshold = 0.0;
  double rate = 0.0;
  double se = 0.0;
  std::uint64_t seed = 0;
};

/// Per-trial decision statistic (eps_min for ASO, p-value otherwise) for
/// samples of size n drawn from a and b. Trial i uses the stream
/// derive_seed(seed, i), so results do not depend on `workers`.
std::vector<double> simulate_statistics(const TestSpec& test, const DistSpec& a,
                                        const DistSpec& b, std::size_t n,
                                        std::size_t trials, std::uint64_t seed,
                                        unsigned workers = 0);

/// Fraction of statistics strictly below `threshold`. eps_min and p-values
/// both reject on the low side.
double rejection_rate(const std::vector<double>& statistics, double threshold);

ErrorRateReport type1_rate(const TestSpec& test, const DistSpec& dist, std::size_t n,
                           std::size_t trials, std::uint64_t seed, unsigned workers = 0);

/// `a` is the intended-better system; the rate counts non-rejections.
ErrorRateReport type2_rate(const TestSpec& test, const DistSpec& a, const DistSpec& b,
                           std::size_t n, std::size_t trials, std::uint64_t seed,
                           unsigned workers = 0);

/// One simulation, evaluated at several thresholds. Type I when `b` is null.
std::vector<ErrorRateReport> rate_sweep(const TestSpec& test, const DistSpec& a,
                                        const DistSpec* b, std::size_t n,
                                        std::size_t trials,
                                        const std::vector<double>& thresholds,
                                        std::uint64_t seed, unsigned workers = 0);

}  // namespace uqkit
