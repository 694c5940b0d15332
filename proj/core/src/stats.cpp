#include "kpz/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kpz/errors.hpp"

namespace kpz::stats {

double pairwise_sum(std::span<const double> v) noexcept {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double mean(std::span<const double> v) {
  if (v.empty()) throw InvalidArgument("mean: empty sample");
  return pairwise_sum(v) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) throw InvalidArgument("sample_variance: need at least two values");
  const double m = mean(v);
  std::vector<double> d(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) d[i] = (v[i] - m) * (v[i] - m);
  return pairwise_sum(d) / static_cast<double>(v.size() - 1);
}

double standard_error(std::span<const double> v) {
  return std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("linear_fit: x and y differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw FitError("linear_fit: need at least two points, got " + std::to_string(n));
  const double mx = mean(x), my = mean(y);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("linear_fit: all x values coincide");
  LinearFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f(x[i]);
    sse += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  if (n > 2) {
    const double s2 = sse / static_cast<double>(n - 2);
    f.slope_se = std::sqrt(s2 / sxx);
    f.intercept_se = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
  }
  return f;
}

LinearFit fit_through_origin(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("fit_through_origin: x and y differ in length");
  const std::size_t n = x.size();
  if (n < 1) throw FitError("fit_through_origin: no points");
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  if (!(sxx > 0.0)) throw FitError("fit_through_origin: all x values are zero");
  LinearFit f;
  f.n = n;
  f.slope = sxy / sxx;
  const double sse = std::max(0.0, syy - f.slope * sxy);
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  if (n > 1) f.slope_se = std::sqrt(sse / static_cast<double>(n - 1) / sxx);
  return f;
}

LinearFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("loglog_fit: x and y differ in length");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw FitError("loglog_fit: non-positive value at index " + std::to_string(i));
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return linear_fit(lx, ly);
}

}  // namespace kpz::stats
