#include "fatigue/mcd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fatigue/stats.hpp"

namespace fatigue::mcd {

int choose_h(int n, double alpha) {
  if (n < 2) throw std::invalid_argument("choose_h: n must be >= 2");
  if (!(alpha >= 0.5 && alpha <= 1.0))
    throw std::invalid_argument("choose_h: alpha must be in [0.5, 1]");
  constexpr int p = 1;
  const int floor_bound = (n + p + 1) / 2;
  const int from_alpha = static_cast<int>(std::ceil(alpha * n));
  return std::min(n, std::max(from_alpha, floor_bound));
}

SubsetEstimate exact_univariate_mcd(std::span<const double> data, int h) {
  const int n = static_cast<int>(data.size());
  if (h < 2) throw std::invalid_argument("exact_univariate_mcd: h must be >= 2");
  if (h > n) throw std::invalid_argument("exact_univariate_mcd: h exceeds n");

  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());

  // Prefix sums in extended precision; variance of window [s, s+h) from
  // sums of x and x^2.
  std::vector<long double> ps(n + 1, 0.0L), ps2(n + 1, 0.0L);
  for (int i = 0; i < n; ++i) {
    ps[i + 1] = ps[i] + sorted[i];
    ps2[i + 1] = ps2[i] + static_cast<long double>(sorted[i]) * sorted[i];
  }

  int best_start = 0;
  long double best_var = -1.0L;
  for (int s = 0; s + h <= n; ++s) {
    const long double sum = ps[s + h] - ps[s];
    const long double sum2 = ps2[s + h] - ps2[s];
    long double var = (sum2 - sum * sum / h) / (h - 1);
    if (var < 0.0L) var = 0.0L;
    if (best_var < 0.0L || var < best_var) {
      best_var = var;
      best_start = s;
    }
  }

  // Recompute the winning window two-pass for full double accuracy.
  const std::span<const double> win(sorted.data() + best_start,
                                    static_cast<size_t>(h));
  SubsetEstimate est;
  est.location = stats::mean(win);
  est.raw_scale = stats::sample_variance(win);
  est.subset_start = best_start;
  return est;
}

double consistency_factor(double alpha, int p) {
  if (!(alpha >= 0.5 && alpha <= 1.0))
    throw std::invalid_argument("consistency_factor: alpha must be in [0.5, 1]");
  if (p < 1) throw std::invalid_argument("consistency_factor: p must be >= 1");
  if (alpha == 1.0) return 1.0;
  const double q = stats::chi_square_quantile(alpha, p);
  const double f = stats::chi_square_cdf(q, p + 2);
  return alpha / f;
}

RobustEstimate robust_estimate(std::span<const double> data,
                               const MCDConfig& cfg) {
  const int n = static_cast<int>(data.size());
  if (n < 2) throw std::invalid_argument("robust_estimate: need at least 2 values");
  const int h = choose_h(n, cfg.alpha);
  const SubsetEstimate core = exact_univariate_mcd(data, h);

  RobustEstimate est;
  est.location = core.location;
  est.raw_scale = core.raw_scale;
  // Consistency is driven by the realized coverage h/n, not the requested
  // alpha, so small samples scale correctly.
  est.consistency_factor =
      consistency_factor(static_cast<double>(h) / n, cfg.p);
  est.scaled_scale = est.consistency_factor * est.raw_scale;
  est.h = h;
  est.subset_start = core.subset_start;
  return est;
}

}  // namespace fatigue::mcd
