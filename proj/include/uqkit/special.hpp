#pragma once

#include <span>

namespace uqkit {

/// Standard-normal inverse CDF (Wichura's AS241 rational approximation,
/// |error| < 1e-15 over (0, 1)).
double normal_quantile(double p);

double normal_cdf(double x);

/// Upper tail P(T >= t) of Student's t with `df` degrees of freedom.
double student_t_sf(double t, double df);

/// Digamma via upward recurrence to x >= 10 followed by the asymptotic
/// series. Accurate to 1e-10 absolute for x >= 1e-3.
double digamma(double x);

double log_gamma(double x);

/// log B(alpha) = sum_k log Gamma(alpha_k) - log Gamma(sum_k alpha_k).
double log_beta(std::span<const double> alpha);

}  // namespace uqkit
