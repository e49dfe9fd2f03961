#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "fatigue/rng.hpp"
#include "fatigue/stats.hpp"

using namespace fatigue;

namespace {

// Independent oracle for the regularized lower incomplete gamma:
// adaptive Simpson quadrature of t^(a-1) e^-t on [0, x], normalized by
// tgamma(a). Slow but implementation-independent.
double gamma_p_quadrature(double a, double x) {
  // Substituting t = u^2 removes the endpoint singularity for a < 1:
  // integral of 2 u^(2a-1) e^(-u^2) du on [0, sqrt(x)].
  auto integrand = [a](double u) {
    const double e = 2.0 * a - 1.0;
    if (u <= 0.0) return e == 0.0 ? 2.0 : 0.0;
    return 2.0 * std::pow(u, e) * std::exp(-u * u);
  };
  const int n = 200000;  // even
  const double hi = std::sqrt(x);
  const double h = hi / n;
  double sum = integrand(0.0) + integrand(hi);
  for (int i = 1; i < n; ++i)
    sum += integrand(i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0 / std::tgamma(a);
}

}  // namespace

TEST_CASE("mean") {
  CHECK(stats::mean(std::vector<double>{5, 5, 5}) == 5.0);
  CHECK(stats::mean(std::vector<double>{1, 2, 3, 4, 5}) == 3.0);
  CHECK(stats::mean(std::vector<double>{-1, 2}) == 0.5);
  CHECK_THROWS_AS(stats::mean(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("sample_variance") {
  CHECK(stats::sample_variance(std::vector<double>{7, 7, 7, 7}) == 0.0);
  CHECK(stats::sample_variance(std::vector<double>{1, 2, 3, 4, 5}) ==
        doctest::Approx(2.5).epsilon(1e-12));
  CHECK(stats::sample_variance(std::vector<double>{0, 2}) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(stats::sample_variance(std::vector<double>{1}),
                  std::invalid_argument);
}

TEST_CASE("population_autocovariance") {
  CHECK(stats::population_autocovariance(std::vector<double>{7, 7, 7}) == 0.0);
  CHECK(stats::population_autocovariance(std::vector<double>{1, 2, 3, 4, 5}) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(stats::population_autocovariance(std::vector<double>{}),
                  std::invalid_argument);
}

TEST_CASE("variance identities under translation and scaling") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t n = 2 + static_cast<size_t>(rng.next_index(40));
    std::vector<double> s(n), shifted(n), scaled(n);
    const double c = 100.0 * (rng.next_double() - 0.5);
    const double a = 0.1 + 5.0 * rng.next_double();
    for (size_t i = 0; i < n; ++i) {
      s[i] = rng.next_normal();
      shifted[i] = s[i] + c;
      scaled[i] = a * s[i];
    }
    const double v = stats::sample_variance(s);
    CHECK(stats::sample_variance(shifted) == doctest::Approx(v).epsilon(1e-9));
    CHECK(stats::sample_variance(scaled) ==
          doctest::Approx(a * a * v).epsilon(1e-12));
    CHECK(stats::population_autocovariance(scaled) ==
          doctest::Approx(a * a * stats::population_autocovariance(s))
              .epsilon(1e-12));
    // 1/N vs 1/(N-1) divisor relation
    CHECK(stats::population_autocovariance(s) ==
          doctest::Approx(v * (n - 1.0) / n).epsilon(1e-12));
  }
}

TEST_CASE("chi_square_cdf against quadrature oracle") {
  CHECK(stats::chi_square_cdf(0.0, 1) == 0.0);
  CHECK(stats::chi_square_cdf(0.0, 5) == 0.0);
  // Frozen values, cross-checked with the quadrature oracle below.
  CHECK(stats::chi_square_cdf(0.45494, 3) == doctest::Approx(0.07133).epsilon(2e-3));
  CHECK(stats::chi_square_cdf(1.32330, 3) == doctest::Approx(0.27641).epsilon(1e-3));
  CHECK(std::abs(stats::chi_square_cdf(0.45494, 3) - 0.07133) < 1e-4);
  CHECK(std::abs(stats::chi_square_cdf(1.32330, 3) - 0.27641) < 1e-4);

  for (const auto [x, k] : {std::pair{0.45494, 3}, {1.32330, 3}, {2.5, 1},
                            {7.0, 4}, {12.0, 8}}) {
    const double oracle = gamma_p_quadrature(0.5 * k, 0.5 * x);
    CHECK(stats::chi_square_cdf(x, k) == doctest::Approx(oracle).epsilon(1e-7));
  }
  CHECK_THROWS_AS(stats::chi_square_cdf(-1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(stats::chi_square_cdf(1.0, 0), std::invalid_argument);
}

TEST_CASE("chi_square_cdf monotone in x, range [0,1)") {
  for (int k : {1, 2, 3, 7}) {
    double prev = 0.0;
    for (double x = 0.0; x <= 60.0; x += 0.5) {
      const double v = stats::chi_square_cdf(x, k);
      CHECK(v >= prev);
      CHECK(v >= 0.0);
      CHECK(v < 1.0 + 1e-15);
      prev = v;
    }
  }
}

TEST_CASE("chi_square_quantile") {
  CHECK(stats::chi_square_quantile(0.5, 1) == doctest::Approx(0.45494).epsilon(1e-4));
  CHECK(stats::chi_square_quantile(0.75, 1) == doctest::Approx(1.32330).epsilon(1e-4));
  CHECK_THROWS_AS(stats::chi_square_quantile(0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(stats::chi_square_quantile(1.0, 1), std::invalid_argument);

  // Inverse round trip.
  for (int k : {1, 2, 3, 10}) {
    for (double q : {0.01, 0.1, 0.5, 0.9, 0.975, 0.999}) {
      const double x = stats::chi_square_quantile(q, k);
      CHECK(std::abs(stats::chi_square_cdf(x, k) - q) < 1e-9);
    }
  }
}

TEST_CASE("f_distribution_sf") {
  // Hand ANOVA table cross-check lives in test_evaluation; here just shape.
  CHECK(stats::f_distribution_sf(0.0, 1, 4) == doctest::Approx(1.0));
  CHECK(stats::f_distribution_sf(1.5, 1, 4) == doctest::Approx(0.2879).epsilon(2e-3));
  double prev = 1.0;
  for (double f = 0.0; f < 20.0; f += 0.25) {
    const double v = stats::f_distribution_sf(f, 3, 17);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}
