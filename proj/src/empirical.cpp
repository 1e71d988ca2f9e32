#include "uqkit/empirical.hpp"

#include <algorithm>
#include <cmath>

#include "uqkit/error.hpp"

namespace uqkit {

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  require(!values_.empty(), "empty sample");
  for (double v : values_) require(std::isfinite(v), "non-finite value in sample");
}

EmpiricalDistribution::EmpiricalDistribution(const Sample& sample)
    : sorted_(sample.values().begin(), sample.values().end()) {
  std::stable_sort(sorted_.begin(), sorted_.end());
}

double EmpiricalDistribution::cdf(double t) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::quantile(double p) const {
  require(p > 0.0 && p < 1.0, "quantile level out of range");
  return quantile_at(p);
}

double EmpiricalDistribution::quantile_at(double p) const {
  const auto n = static_cast<std::ptrdiff_t>(sorted_.size());
  const auto index = static_cast<std::ptrdiff_t>(std::ceil(static_cast<double>(n) * p));
  return sorted_[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(index - 1, 0, n - 1))];
}

double empirical_cdf(const Sample& sample, double t) {
  return EmpiricalDistribution(sample).cdf(t);
}

double empirical_quantile(const Sample& sample, double p) {
  return EmpiricalDistribution(sample).quantile(p);
}

Sample bootstrap_resample(const EmpiricalDistribution& dist, std::size_t m, Rng& rng) {
  require(m >= 1, "resample size must be at least 1");
  std::vector<double> out(m);
  for (auto& v : out) v = dist.quantile_at(rng.uniform());
  return Sample(std::move(out));
}

Sample bootstrap_resample(const Sample& sample, std::size_t m, Rng& rng) {
  return bootstrap_resample(EmpiricalDistribution(sample), m, rng);
}

}  // namespace uqkit
