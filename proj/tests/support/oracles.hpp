// Brute-force reference implementations. Deliberately naive: they share no
// code with the library and favour obviousness over speed.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

// Quantile function of the empirical distribution: smallest x with F(x) >= p.
inline double quantile(std::vector<double> xs, double p) {
  std::sort(xs.begin(), xs.end());
  for (double x : xs) {
    double below = 0.0;
    for (double y : xs) below += y <= x ? 1.0 : 0.0;
    if (below / static_cast<double>(xs.size()) >= p) return x;
  }
  return xs.back();
}

// Midpoint-rule integral of the violation ratio over (0, 1).
inline double violation_ratio(const std::vector<double>& a, const std::vector<double>& b, double dt) {
  std::vector<double> sa = a;
  std::vector<double> sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  auto q = [](const std::vector<double>& s, double p) {
    const auto n = static_cast<double>(s.size());
    auto index = static_cast<std::ptrdiff_t>(std::ceil(n * p)) - 1;
    index = std::clamp<std::ptrdiff_t>(index, 0, static_cast<std::ptrdiff_t>(s.size()) - 1);
    return s[static_cast<std::size_t>(index)];
  };
  double violated = 0.0;
  double total = 0.0;
  for (double t = dt / 2; t < 1.0; t += dt) {
    const double d = q(sb, t) - q(sa, t);
    total += d * d * dt;
    if (d > 0) violated += d * d * dt;
  }
  return total == 0.0 ? 0.5 : violated / total;
}

// One-sided exact Mann-Whitney p-value P(U_a >= observed) by enumerating every
// assignment of the pooled observations to group a.
inline double mann_whitney_exact(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  auto u_stat = [&](const std::vector<bool>& in_a) {
    double u = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_a[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (in_a[j]) continue;
        u += pooled[i] > pooled[j] ? 1.0 : pooled[i] == pooled[j] ? 0.5 : 0.0;
      }
    }
    return u;
  };
  std::vector<bool> observed(n, false);
  std::fill(observed.begin(), observed.begin() + static_cast<std::ptrdiff_t>(a.size()), true);
  const double u_obs = u_stat(observed);
  std::size_t total = 0;
  std::size_t extreme = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != a.size()) continue;
    std::vector<bool> in_a(n);
    for (std::size_t i = 0; i < n; ++i) in_a[i] = (mask >> i) & 1;
    ++total;
    if (u_stat(in_a) >= u_obs - 1e-9) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

inline double ece(const std::vector<double>& conf, const std::vector<int>& correct, std::size_t bins) {
  double result = 0.0;
  for (std::size_t m = 0; m < bins; ++m) {
    const double lo = static_cast<double>(m) / static_cast<double>(bins);
    const double hi = static_cast<double>(m + 1) / static_cast<double>(bins);
    double count = 0.0;
    double conf_sum = 0.0;
    double acc_sum = 0.0;
    for (std::size_t i = 0; i < conf.size(); ++i) {
      const bool last = m + 1 == bins;
      if (conf[i] >= lo && (conf[i] < hi || (last && conf[i] <= 1.0))) {
        count += 1.0;
        conf_sum += conf[i];
        acc_sum += correct[i];
      }
    }
    if (count > 0) result += count / static_cast<double>(conf.size()) * std::fabs(acc_sum / count - conf_sum / count);
  }
  return result;
}

struct CoverageOracle {
  double coverage;
  double width;
  double ssc;
  double ecg;
};

// Size bin b holds sizes s with b <= s * bins / V < b + 1, the last bin also
// taking s = V.
inline CoverageOracle coverage(const std::vector<std::size_t>& sizes, const std::vector<int>& covered,
                               double alpha, std::size_t vocab, std::size_t bins) {
  const auto n = static_cast<double>(sizes.size());
  CoverageOracle r{0.0, 0.0, std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    r.coverage += covered[i] / n;
    r.width += static_cast<double>(sizes[i]) / static_cast<double>(vocab) / n;
  }
  for (std::size_t b = 0; b < bins; ++b) {
    double count = 0.0;
    double hits = 0.0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const double position = static_cast<double>(sizes[i]) * static_cast<double>(bins) / static_cast<double>(vocab);
      const bool inside = (position >= static_cast<double>(b) && position < static_cast<double>(b + 1)) ||
                          (b + 1 == bins && position >= static_cast<double>(bins));
      if (inside) {
        count += 1.0;
        hits += covered[i];
      }
    }
    if (count == 0) continue;
    const double cov = hits / count;
    r.ssc = std::min(r.ssc, cov);
    r.ecg += count / n * std::max(0.0, (1.0 - alpha) - cov);
  }
  return r;
}

inline double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      wins += scores[i] > scores[j] ? 1.0 : scores[i] == scores[j] ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

inline double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  double concordant = 0.0;
  double discordant = 0.0;
  double ties_x = 0.0;
  double ties_y = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      pairs += 1.0;
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0) ties_x += 1.0;
      if (dy == 0) ties_y += 1.0;
      if (dx * dy > 0) concordant += 1.0;
      if (dx * dy < 0) discordant += 1.0;
    }
  }
  return (concordant - discordant) / std::sqrt((pairs - ties_x) * (pairs - ties_y));
}

inline double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0) h -= x * std::log(x);
  }
  return h;
}

inline double mutual_information(const std::vector<std::vector<double>>& rows) {
  const std::size_t k = rows.front().size();
  std::vector<double> mean(k, 0.0);
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < k; ++j) mean[j] += row[j];
  }
  for (double& m : mean) m /= static_cast<double>(rows.size());
  double expected = 0.0;
  for (const auto& row : rows) expected += entropy(row);
  expected /= static_cast<double>(rows.size());
  return std::max(0.0, entropy(mean) - expected);
}

// Ranking by linear scan over float-rounded vectors; returns (index, key).
inline std::vector<std::pair<std::size_t, double>> linear_scan(const std::vector<std::vector<float>>& records,
                                                               const std::vector<double>& query,
                                                               std::size_t k, int metric) {
  const std::size_t dim = query.size();
  std::vector<double> q(dim);
  for (std::size_t j = 0; j < dim; ++j) q[j] = static_cast<float>(query[j]);
  std::vector<std::pair<std::size_t, double>> all;
  for (std::size_t i = 0; i < records.size(); ++i) {
    double dot = 0.0;
    double nr = 0.0;
    double nq = 0.0;
    double dist = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double r = records[i][j];
      dot += r * q[j];
      nr += r * r;
      nq += q[j] * q[j];
      dist += (r - q[j]) * (r - q[j]);
    }
    double key = dist;
    if (metric == 1) key = dot / std::sqrt(static_cast<double>(dim));
    if (metric == 2) key = (nr == 0 || nq == 0) ? 0.0 : dot / (std::sqrt(nr) * std::sqrt(nq));
    all.emplace_back(i, key);
  }
  std::stable_sort(all.begin(), all.end(), [metric](const auto& l, const auto& r) {
    return metric == 0 ? l.second < r.second : l.second > r.second;
  });
  all.resize(std::min(k, all.size()));
  return all;
}

}  // namespace oracle
