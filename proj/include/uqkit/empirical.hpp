#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uqkit/rng.hpp"

namespace uqkit {

/// A non-empty collection of finite observations (model scores).
class Sample {
 public:
  explicit Sample(std::vector<double> values);
  Sample(std::initializer_list<double> values)
      : Sample(std::vector<double>(values)) {}

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

/// Sorted view of a sample supporting repeated CDF and quantile lookups.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(const Sample& sample);

  /// (1/n) * #{x_i <= t}.
  double cdf(double t) const;

  /// sorted[clamp(ceil(n p) - 1, 0, n - 1)] for p in (0, 1).
  double quantile(double p) const;

  /// Same index rule without the range check; p = 0 maps to the minimum.
  double quantile_at(double p) const;

  std::span<const double> sorted() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

double empirical_cdf(const Sample& sample, double t);
double empirical_quantile(const Sample& sample, double p);

/// m draws by inverse-transform sampling: p ~ U[0,1) pushed through the
/// empirical quantile function.
Sample bootstrap_resample(const EmpiricalDistribution& dist, std::size_t m, Rng& rng);
Sample bootstrap_resample(const Sample& sample, std::size_t m, Rng& rng);

}  // namespace uqkit
