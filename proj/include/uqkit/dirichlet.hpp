#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "uqkit/conformal.hpp"
#include "uqkit/rng.hpp"

namespace uqkit {

inline constexpr double kMinConcentration = 1e-3;

/// Concentration vector of a Dirichlet over K >= 2 classes. Entries below
/// 1e-3 are rejected to keep the digamma evaluations accurate.
class DirichletParams {
 public:
  explicit DirichletParams(std::vector<double> alpha);

  std::span<const double> alpha() const { return alpha_; }
  double alpha0() const { return alpha0_; }
  std::size_t size() const { return alpha_.size(); }

 private:
  std::vector<double> alpha_;
  double alpha0_;
};

/// alpha_k / alpha_0.
ProbVector mean(const DirichletParams& d);

/// E[log pi_k] = psi(alpha_k) - psi(alpha_0).
double log_expectation(const DirichletParams& d, std::size_t k);

/// Differential entropy in nats.
double entropy(const DirichletParams& d);

/// E[H(pi)] for pi ~ Dir(alpha).
double expected_entropy(const DirichletParams& d);

/// KL(Dir(alpha) || Dir(reference)).
double kl(const DirichletParams& d, const DirichletParams& reference);

/// KL(Dir(alpha) || Dir(1, ..., 1)).
double kl_uniform(const DirichletParams& d);

/// H[E[pi]] - E[H(pi)].
double mutual_information(const DirichletParams& d);

/// log density at a point of the open simplex.
double log_density(const DirichletParams& d, std::span<const double> pi);

/// One draw via normalised Gamma(alpha_k, 1) variates.
std::vector<double> sample(const DirichletParams& d, Rng& rng);

struct MonteCarloComparison {
  std::string quantity;  // e.g. "entropy", "mean[2]"
  double closed_form = 0.0;
  double estimate = 0.0;
  double standard_error = 0.0;
  double z = 0.0;  // (estimate - closed_form) / standard_error, 0 when both agree exactly
};

/// Compares every closed form above with a Monte Carlo estimate from
/// `samples` draws of d. KL is checked against `reference`.
std::vector<MonteCarloComparison> monte_carlo_check(const DirichletParams& d,
                                                    const DirichletParams& reference,
                                                    std::size_t samples, Rng& rng);

}  // namespace uqkit
