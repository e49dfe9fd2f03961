#pragma once

#include <span>

namespace fatigue::mcd {

struct MCDConfig {
  double alpha = 0.5;  // target coverage fraction h/n; 0.5 is the boundary
  int p = 1;           // dimension; the pipeline is univariate
};

struct RobustEstimate {
  double location = 0.0;            // robust mean of the optimal h-subset
  double raw_scale = 0.0;           // subset sample variance, divisor h-1
  double consistency_factor = 1.0;  // Gaussian-consistency multiplier
  double scaled_scale = 0.0;        // consistency_factor * raw_scale
  int h = 0;
  int subset_start = 0;  // index into the sorted data
};

// Subset size for coverage alpha: max(ceil(alpha*n), floor((n+p+1)/2)),
// clamped to n. alpha in [0.5, 1]; p fixed at 1.
int choose_h(int n, double alpha);

struct SubsetEstimate {
  double location = 0.0;
  double raw_scale = 0.0;
  int subset_start = 0;
};

// Exact univariate MCD: the optimal h-subset is a contiguous block of the
// sorted sample, so scanning the n-h+1 windows finds the global minimum in
// O(n log n). Ties broken by smallest start index in sorted order.
SubsetEstimate exact_univariate_mcd(std::span<const double> data, int h);

// c0 = alpha / F_chi2(p+2)(chi2-quantile(alpha, p)). Exactly 1 at alpha = 1,
// monotone nonincreasing in alpha.
double consistency_factor(double alpha, int p = 1);

// choose_h + exact_univariate_mcd + consistency_factor composed.
RobustEstimate robust_estimate(std::span<const double> data,
                               const MCDConfig& cfg);

}  // namespace fatigue::mcd
