#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "uqkit/empirical.hpp"
#include "uqkit/rng.hpp"

namespace uqkit {

inline constexpr double kDefaultDt = 0.005;
inline constexpr std::size_t kDefaultBootstrap = 1000;
inline constexpr double kDefaultAsoThreshold = 0.2;

/// Fraction of the squared quantile-difference mass where a's quantile
/// function lies below b's, integrated on the grid {dt, 2dt, ...} inside
/// (0, 1). 0 means a dominates b, 1 the reverse. Returns 0.5 when the two
/// quantile functions coincide on the grid (W2 = 0).
double violation_ratio(const EmpiricalDistribution& a, const EmpiricalDistribution& b,
                       double dt = kDefaultDt);
double violation_ratio(const Sample& a, const Sample& b, double dt = kDefaultDt);

struct AsoOptions {
  double alpha = 0.05;  // confidence level enters as Phi^{-1}(alpha)
  std::size_t num_bootstrap = kDefaultBootstrap;
  double dt = kDefaultDt;
};

struct AsoResult {
  double eps_min = 0.0;          // clamped into [0, 1]
  double violation_ratio = 0.0;  // in [0, 1]
  double sigma_hat = 0.0;        // bootstrap std of the rescaled ratio

  /// a is declared almost stochastically larger than b.
  bool rejects(double tau = kDefaultAsoThreshold) const { return eps_min < tau; }
};

/// Almost Stochastic Order test of "a is better than b".
AsoResult aso(const Sample& a, const Sample& b, const AsoOptions& options, Rng& rng);

enum class TestKind {
  kAso,
  kStudentT,
  kBootstrap,
  kPermutation,
  kWilcoxon,
  kMannWhitney,
};

std::string_view to_string(TestKind kind);
std::optional<TestKind> parse_test_kind(std::string_view name);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// One-sided tests of H1: "a tends to be larger than b".

/// Pooled-variance two-sample t test.
TestResult student_t_test(const Sample& a, const Sample& b);

/// Difference of means, both samples recentred on the pooled mean before
/// resampling. p = (r + 1) / (B + 1).
TestResult bootstrap_test(const Sample& a, const Sample& b, std::size_t resamples, Rng& rng);

/// Difference of means under random relabelling. p = (r + 1) / (B + 1).
TestResult permutation_test(const Sample& a, const Sample& b, std::size_t resamples, Rng& rng);

/// Paired signed-rank test on a - b. Zero differences are dropped, ties get
/// mid-ranks. Exact null distribution up to 50 non-zero pairs, normal
/// approximation with tie and continuity correction beyond.
TestResult wilcoxon_signed_rank(const Sample& a, const Sample& b);

/// Rank-sum test, statistic U_a. Exact enumeration when both samples have at
/// most 12 elements, otherwise normal approximation with tie and continuity
/// correction.
TestResult mann_whitney_u(const Sample& a, const Sample& b);

/// Dispatches to one of the tests above. `kind` must not be kAso.
TestResult classic_test(TestKind kind, const Sample& a, const Sample& b,
                        std::size_t resamples, Rng& rng);

double bonferroni(double alpha, std::size_t num_comparisons);

}  // namespace uqkit
