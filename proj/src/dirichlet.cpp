#include "uqkit/dirichlet.hpp"

#include <cmath>
#include <random>

#include "uqkit/error.hpp"
#include "uqkit/special.hpp"

namespace uqkit {
namespace {

double entropy_of(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

// Welford accumulator for a Monte Carlo mean and its standard error.
class RunningMean {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  double mean() const { return mean_; }
  double standard_error() const {
    return n_ > 1 ? std::sqrt(m2_ / static_cast<double>(n_ - 1) / static_cast<double>(n_)) : 0.0;
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

MonteCarloComparison compare(std::string quantity, double closed_form, const RunningMean& mc) {
  MonteCarloComparison c;
  c.quantity = std::move(quantity);
  c.closed_form = closed_form;
  c.estimate = mc.mean();
  c.standard_error = mc.standard_error();
  const double diff = c.estimate - c.closed_form;
  c.z = c.standard_error > 0.0 ? diff / c.standard_error : (diff == 0.0 ? 0.0 : INFINITY);
  return c;
}

}  // namespace

DirichletParams::DirichletParams(std::vector<double> alpha) : alpha_(std::move(alpha)), alpha0_(0.0) {
  require(alpha_.size() >= 2, "dirichlet needs at least two classes");
  for (double a : alpha_) {
    require(std::isfinite(a) && a >= kMinConcentration, "concentration parameters must be >= 1e-3");
    alpha0_ += a;
  }
}

ProbVector mean(const DirichletParams& d) {
  std::vector<double> p(d.alpha().begin(), d.alpha().end());
  for (auto& x : p) x /= d.alpha0();
  return ProbVector(std::move(p));
}

double log_expectation(const DirichletParams& d, std::size_t k) {
  require(k < d.size(), "class index out of range");
  return digamma(d.alpha()[k]) - digamma(d.alpha0());
}

double entropy(const DirichletParams& d) {
  const auto k = static_cast<double>(d.size());
  double h = log_beta(d.alpha()) + (d.alpha0() - k) * digamma(d.alpha0());
  for (double a : d.alpha()) h -= (a - 1.0) * digamma(a);
  return h;
}

double expected_entropy(const DirichletParams& d) {
  const double psi0 = digamma(d.alpha0() + 1.0);
  double h = 0.0;
  for (double a : d.alpha()) h -= a / d.alpha0() * (digamma(a + 1.0) - psi0);
  return h;
}

double kl(const DirichletParams& d, const DirichletParams& reference) {
  require(d.size() == reference.size(), "dirichlets differ in dimension");
  const double psi0 = digamma(d.alpha0());
  double divergence = log_beta(reference.alpha()) - log_beta(d.alpha());
  for (std::size_t k = 0; k < d.size(); ++k) {
    divergence += (d.alpha()[k] - reference.alpha()[k]) * (digamma(d.alpha()[k]) - psi0);
  }
  return divergence;
}

double kl_uniform(const DirichletParams& d) {
  return kl(d, DirichletParams(std::vector<double>(d.size(), 1.0)));
}

double mutual_information(const DirichletParams& d) {
  const double psi0 = digamma(d.alpha0() + 1.0);
  double mi = 0.0;
  for (double a : d.alpha()) {
    const double p = a / d.alpha0();
    mi -= p * (std::log(p) - digamma(a + 1.0) + psi0);
  }
  return mi;
}

double log_density(const DirichletParams& d, std::span<const double> pi) {
  require(pi.size() == d.size(), "point differs in dimension");
  double value = -log_beta(d.alpha());
  for (std::size_t k = 0; k < d.size(); ++k) value += (d.alpha()[k] - 1.0) * std::log(pi[k]);
  return value;
}

std::vector<double> sample(const DirichletParams& d, Rng& rng) {
  std::vector<double> pi(d.size());
  double total = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    std::gamma_distribution<double> gamma(d.alpha()[k], 1.0);
    pi[k] = gamma(rng.engine());
    total += pi[k];
  }
  for (auto& x : pi) x /= total;
  return pi;
}

std::vector<MonteCarloComparison> monte_carlo_check(const DirichletParams& d,
                                                    const DirichletParams& reference,
                                                    std::size_t samples, Rng& rng) {
  require(samples >= 2, "monte carlo check needs at least two samples");
  require(d.size() == reference.size(), "dirichlets differ in dimension");
  const std::size_t k = d.size();
  const ProbVector center = mean(d);

  std::vector<RunningMean> component_mean(k);
  std::vector<RunningMean> component_log(k);
  RunningMean neg_log_density;
  RunningMean sample_entropy;
  RunningMean log_ratio;
  RunningMean information;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto pi = sample(d, rng);
    double info = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      component_mean[j].add(pi[j]);
      component_log[j].add(std::log(pi[j]));
      if (pi[j] > 0.0) info += pi[j] * std::log(pi[j] / center[j]);
    }
    const double log_p = log_density(d, pi);
    neg_log_density.add(-log_p);
    sample_entropy.add(entropy_of(pi));
    log_ratio.add(log_p - log_density(reference, pi));
    information.add(info);
  }

  std::vector<MonteCarloComparison> out;
  for (std::size_t j = 0; j < k; ++j) {
    out.push_back(compare("mean[" + std::to_string(j) + "]", center[j], component_mean[j]));
  }
  for (std::size_t j = 0; j < k; ++j) {
    out.push_back(compare("log_expectation[" + std::to_string(j) + "]", log_expectation(d, j),
                          component_log[j]));
  }
  out.push_back(compare("entropy", entropy(d), neg_log_density));
  out.push_back(compare("expected_entropy", expected_entropy(d), sample_entropy));
  out.push_back(compare("kl", kl(d, reference), log_ratio));
  out.push_back(compare("mutual_information", mutual_information(d), information));
  return out;
}

}  // namespace uqkit
