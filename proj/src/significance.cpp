#include "uqkit/significance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "uqkit/error.hpp"
#include "uqkit/special.hpp"

namespace uqkit {
namespace {

std::size_t grid_points(double dt) {
  // Matches the point count of arange(dt, 1, dt).
  auto count = static_cast<std::size_t>(std::ceil((1.0 - dt) / dt));
  while (count > 0 && dt * static_cast<double>(count) >= 1.0) --count;
  return count;
}

double mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sum_squared_deviation(std::span<const double> x, double m) {
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s;
}

// Doubled mid-ranks of `values` (1-based), so tied ranks stay integral.
// Also returns sum over tie groups of (t^3 - t).
std::pair<std::vector<long>, double> doubled_midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<long> ranks(n);
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const long doubled = static_cast<long>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = doubled;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  return {std::move(ranks), tie_term};
}

}  // namespace

double violation_ratio(const EmpiricalDistribution& a, const EmpiricalDistribution& b,
                       double dt) {
  require(dt > 0.0 && dt < 1.0, "integration step dt out of range");
  const std::size_t points = grid_points(dt);
  double violation = 0.0;
  double total = 0.0;
  for (std::size_t i = 1; i <= points; ++i) {
    const double t = dt * static_cast<double>(i);
    const double f = a.quantile_at(t);
    const double g = b.quantile_at(t);
    const double mass = (f - g) * (f - g) * dt;
    total += mass;
    if (f < g) violation += mass;
  }
  if (total == 0.0) return 0.5;
  return std::clamp(violation / total, 0.0, 1.0);
}

double violation_ratio(const Sample& a, const Sample& b, double dt) {
  return violation_ratio(EmpiricalDistribution(a), EmpiricalDistribution(b), dt);
}

AsoResult aso(const Sample& a, const Sample& b, const AsoOptions& options, Rng& rng) {
  require(options.alpha > 0.0 && options.alpha < 1.0, "alpha out of range");
  require(options.num_bootstrap >= 1, "num_bootstrap must be at least 1");
  const EmpiricalDistribution dist_a(a);
  const EmpiricalDistribution dist_b(b);
  const double eps = violation_ratio(dist_a, dist_b, options.dt);

  const auto n = static_cast<double>(a.size());
  const auto m = static_cast<double>(b.size());
  const double scale = std::sqrt(n * m / (n + m));

  std::vector<double> rescaled(options.num_bootstrap);
  for (auto& r : rescaled) {
    const Sample resampled_a = bootstrap_resample(dist_a, a.size(), rng);
    const Sample resampled_b = bootstrap_resample(dist_b, b.size(), rng);
    r = scale * (violation_ratio(resampled_a, resampled_b, options.dt) - eps);
  }
  const double rescaled_mean = mean(rescaled);
  const double variance =
      sum_squared_deviation(rescaled, rescaled_mean) / static_cast<double>(rescaled.size());

  AsoResult result;
  result.violation_ratio = eps;
  result.sigma_hat = std::sqrt(variance);
  const double eps_min =
      eps - std::sqrt((n + m) / (n * m)) * result.sigma_hat * normal_quantile(options.alpha);
  result.eps_min = std::clamp(eps_min, 0.0, 1.0);
  return result;
}

std::string_view to_string(TestKind kind) {
  switch (kind) {
    case TestKind::kAso: return "aso";
    case TestKind::kStudentT: return "student-t";
    case TestKind::kBootstrap: return "bootstrap";
    case TestKind::kPermutation: return "permutation";
    case TestKind::kWilcoxon: return "wilcoxon";
    case TestKind::kMannWhitney: return "mann-whitney";
  }
  return "unknown";
}

std::optional<TestKind> parse_test_kind(std::string_view name) {
  static constexpr std::array<std::pair<std::string_view, TestKind>, 8> kNames{{
      {"aso", TestKind::kAso},
      {"student-t", TestKind::kStudentT},
      {"t", TestKind::kStudentT},
      {"bootstrap", TestKind::kBootstrap},
      {"permutation", TestKind::kPermutation},
      {"wilcoxon", TestKind::kWilcoxon},
      {"mann-whitney", TestKind::kMannWhitney},
      {"mwu", TestKind::kMannWhitney},
  }};
  for (const auto& [key, kind] : kNames) {
    if (key == name) return kind;
  }
  return std::nullopt;
}

TestResult student_t_test(const Sample& a, const Sample& b) {
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  require(a.size() + b.size() > 2, "student t test needs more than two observations");
  const double mean_a = mean(a.values());
  const double mean_b = mean(b.values());
  const double df = na + nb - 2.0;
  const double pooled =
      (sum_squared_deviation(a.values(), mean_a) + sum_squared_deviation(b.values(), mean_b)) / df;
  require(pooled > 0.0, "degenerate variance");
  const double t = (mean_a - mean_b) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  return {t, student_t_sf(t, df)};
}

TestResult bootstrap_test(const Sample& a, const Sample& b, std::size_t resamples, Rng& rng) {
  require(resamples >= 1, "resamples must be at least 1");
  const double mean_a = mean(a.values());
  const double mean_b = mean(b.values());
  const double observed = mean_a - mean_b;
  const double pooled_mean = (mean_a * static_cast<double>(a.size()) +
                              mean_b * static_cast<double>(b.size())) /
                             static_cast<double>(a.size() + b.size());

  std::vector<double> centred_a(a.values().begin(), a.values().end());
  std::vector<double> centred_b(b.values().begin(), b.values().end());
  for (auto& v : centred_a) v += pooled_mean - mean_a;
  for (auto& v : centred_b) v += pooled_mean - mean_b;

  auto resampled_mean = [&rng](const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[rng.below(x.size())];
    return s / static_cast<double>(x.size());
  };

  std::size_t at_least = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    const double delta = resampled_mean(centred_a) - resampled_mean(centred_b);
    if (delta >= observed) ++at_least;
  }
  return {observed,
          static_cast<double>(at_least + 1) / static_cast<double>(resamples + 1)};
}

TestResult permutation_test(const Sample& a, const Sample& b, std::size_t resamples, Rng& rng) {
  require(resamples >= 1, "resamples must be at least 1");
  std::vector<double> pooled(a.values().begin(), a.values().end());
  pooled.insert(pooled.end(), b.values().begin(), b.values().end());
  const std::size_t na = a.size();

  auto split_difference = [&](const std::vector<double>& x) {
    const double head = std::accumulate(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(na), 0.0);
    const double tail = std::accumulate(x.begin() + static_cast<std::ptrdiff_t>(na), x.end(), 0.0);
    return head / static_cast<double>(na) - tail / static_cast<double>(x.size() - na);
  };

  const double observed = split_difference(pooled);
  // Relabellings that reproduce the observed split differ only by summation order.
  const double tolerance = 1e-12 * (1.0 + std::fabs(observed));
  std::size_t at_least = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    for (std::size_t i = pooled.size() - 1; i > 0; --i) {
      std::swap(pooled[i], pooled[rng.below(i + 1)]);
    }
    if (split_difference(pooled) >= observed - tolerance) ++at_least;
  }
  return {observed,
          static_cast<double>(at_least + 1) / static_cast<double>(resamples + 1)};
}

TestResult wilcoxon_signed_rank(const Sample& a, const Sample& b) {
  require(a.size() == b.size(), "wilcoxon signed-rank test needs paired samples of equal length");
  std::vector<double> magnitudes;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d == 0.0) continue;
    magnitudes.push_back(std::fabs(d));
    positive.push_back(d > 0.0);
  }
  const std::size_t n = magnitudes.size();
  if (n == 0) return {0.0, 1.0};

  const auto [ranks, tie_term] = doubled_midranks(magnitudes);
  long doubled_w = 0;
  long doubled_total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    doubled_total += ranks[i];
    if (positive[i]) doubled_w += ranks[i];
  }
  const double w = static_cast<double>(doubled_w) / 2.0;

  if (n <= 50) {
    // counts[s] = number of sign assignments with doubled positive-rank sum s.
    std::vector<double> counts(static_cast<std::size_t>(doubled_total) + 1, 0.0);
    counts[0] = 1.0;
    long reach = 0;
    for (long r : ranks) {
      for (long s = reach; s >= 0; --s) counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
      reach += r;
    }
    double tail = 0.0;
    for (long s = doubled_w; s <= doubled_total; ++s) tail += counts[static_cast<std::size_t>(s)];
    return {w, std::min(1.0, tail / std::ldexp(1.0, static_cast<int>(n)))};
  }

  const auto nd = static_cast<double>(n);
  const double mu = nd * (nd + 1.0) / 4.0;
  const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) return {w, 1.0};
  const double z = (w - mu - 0.5) / std::sqrt(var);
  return {w, 1.0 - normal_cdf(z)};
}

TestResult mann_whitney_u(const Sample& a, const Sample& b) {
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  std::vector<double> pooled(a.values().begin(), a.values().end());
  pooled.insert(pooled.end(), b.values().begin(), b.values().end());
  const auto [ranks, tie_term] = doubled_midranks(pooled);

  long doubled_rank_sum = 0;
  for (std::size_t i = 0; i < na; ++i) doubled_rank_sum += ranks[i];
  const double u = static_cast<double>(doubled_rank_sum) / 2.0 -
                   static_cast<double>(na * (na + 1)) / 2.0;

  if (std::max(na, nb) <= 12) {
    // ways[j][s]: subsets of size j with doubled rank sum s.
    const long total = std::accumulate(ranks.begin(), ranks.end(), 0L);
    const auto width = static_cast<std::size_t>(total) + 1;
    std::vector<double> ways((na + 1) * width, 0.0);
    ways[0] = 1.0;
    for (long r : ranks) {
      for (std::size_t j = na; j >= 1; --j) {
        for (long s = total - r; s >= 0; --s) {
          ways[j * width + static_cast<std::size_t>(s + r)] +=
              ways[(j - 1) * width + static_cast<std::size_t>(s)];
        }
      }
    }
    double tail = 0.0;
    double all = 0.0;
    for (long s = 0; s <= total; ++s) {
      const double c = ways[na * width + static_cast<std::size_t>(s)];
      all += c;
      if (s >= doubled_rank_sum) tail += c;
    }
    return {u, std::min(1.0, tail / all)};
  }

  const auto n1 = static_cast<double>(na);
  const auto n2 = static_cast<double>(nb);
  const double n = n1 + n2;
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return {u, 1.0};
  const double z = (u - n1 * n2 / 2.0 - 0.5) / std::sqrt(var);
  return {u, 1.0 - normal_cdf(z)};
}

TestResult classic_test(TestKind kind, const Sample& a, const Sample& b,
                        std::size_t resamples, Rng& rng) {
  switch (kind) {
    case TestKind::kStudentT: return student_t_test(a, b);
    case TestKind::kBootstrap: return bootstrap_test(a, b, resamples, rng);
    case TestKind::kPermutation: return permutation_test(a, b, resamples, rng);
    case TestKind::kWilcoxon: return wilcoxon_signed_rank(a, b);
    case TestKind::kMannWhitney: return mann_whitney_u(a, b);
    case TestKind::kAso: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "ASO is not a p-value test; use aso()");
}

double bonferroni(double alpha, std::size_t num_comparisons) {
  require(alpha > 0.0 && alpha < 1.0, "alpha out of range");
  require(num_comparisons >= 1, "number of comparisons must be at least 1");
  return alpha / static_cast<double>(num_comparisons);
}

}  // namespace uqkit
