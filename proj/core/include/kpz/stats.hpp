#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kpz::stats {

/// Pairwise (cascade) summation; result does not depend on thread scheduling.
double pairwise_sum(std::span<const double> values) noexcept;
double mean(std::span<const double> values);
/// Unbiased sample variance (n − 1 denominator).
double sample_variance(std::span<const double> values);
/// Standard error of the mean.
double standard_error(std::span<const double> values);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;

  double operator()(double x) const noexcept { return intercept + slope * x; }
};

/// Ordinary least squares y = a + b x with standard errors. Needs n ≥ 2 distinct x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);
/// Least squares y = b x through the origin.
LinearFit fit_through_origin(std::span<const double> x, std::span<const double> y);

/// Slope of log y against log x.
LinearFit loglog_fit(std::span<const double> x, std::span<const double> y);

}  // namespace kpz::stats
