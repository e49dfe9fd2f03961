#include "fatigue/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fatigue::stats {

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean: empty series");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2)
    throw std::invalid_argument("sample_variance: need at least 2 values");
  const double mu = mean(values);
  double ss = 0.0;
  for (double v : values) {
    const double d = v - mu;
    ss += d * d;
  }
  return ss / static_cast<double>(values.size() - 1);
}

double population_autocovariance(std::span<const double> values) {
  if (values.empty())
    throw std::invalid_argument("population_autocovariance: empty series");
  const double mu = mean(values);
  double ss = 0.0;
  for (double v : values) {
    const double d = v - mu;
    ss += d * d;
  }
  return ss / static_cast<double>(values.size());
}

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-15;
constexpr double kTiny = 1e-300;

// Lower incomplete gamma by power series, valid for x < a+1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma Q(a,x) by modified Lentz continued fraction,
// valid for x >= a+1.
double gamma_q_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_lower_gamma(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("regularized_lower_gamma: a <= 0");
  if (x < 0.0) throw std::invalid_argument("regularized_lower_gamma: x < 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double chi_square_cdf(double x, int k) {
  if (k <= 0) throw std::invalid_argument("chi_square_cdf: dof must be positive");
  if (x < 0.0) throw std::invalid_argument("chi_square_cdf: x < 0");
  return regularized_lower_gamma(0.5 * k, 0.5 * x);
}

double chi_square_quantile(double q, int k) {
  if (k <= 0)
    throw std::invalid_argument("chi_square_quantile: dof must be positive");
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("chi_square_quantile: q must be in (0,1)");
  double lo = 0.0;
  double hi = static_cast<double>(k);
  while (chi_square_cdf(hi, k) < q) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi_square_cdf(mid, k) < q) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-14 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

namespace {

double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double dm = static_cast<double>(m);
    const double m2 = 2.0 * dm;
    double aa = dm * (b - dm) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + dm) * (qab + dm) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0)
    throw std::invalid_argument("regularized_incomplete_beta: a, b must be > 0");
  if (x < 0.0 || x > 1.0)
    throw std::invalid_argument("regularized_incomplete_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_distribution_sf(double f, int d1, int d2) {
  if (d1 <= 0 || d2 <= 0)
    throw std::invalid_argument("f_distribution_sf: dof must be positive");
  if (f < 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double x = static_cast<double>(d2) / (d2 + static_cast<double>(d1) * f);
  return regularized_incomplete_beta(0.5 * d2, 0.5 * d1, x);
}

}  // namespace fatigue::stats
