#pragma once

#include <span>

namespace fatigue::stats {

// Arithmetic mean. Throws std::invalid_argument on an empty series.
double mean(std::span<const double> values);

// Unbiased sample variance, divisor n-1. Requires length >= 2.
double sample_variance(std::span<const double> values);

// Lag-0 autocovariance with divisor n; equals sample_variance * (n-1)/n.
double population_autocovariance(std::span<const double> values);

// Regularized lower incomplete gamma P(a, x), absolute error <= 1e-10.
// Series expansion for x < a+1, continued fraction otherwise.
double regularized_lower_gamma(double a, double x);

// Chi-square CDF with k degrees of freedom: P(k/2, x/2).
double chi_square_cdf(double x, int k);

// Inverse of chi_square_cdf in x, solved by bracketing + bisection to 1e-10.
double chi_square_quantile(double q, int k);

// Regularized incomplete beta I_x(a, b) via Lentz continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// Survival function of the F distribution with (d1, d2) degrees of freedom.
double f_distribution_sf(double f, int d1, int d2);

}  // namespace fatigue::stats
