#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "kpz/errors.hpp"
#include "kpz/growth.hpp"
#include "kpz/stats.hpp"

namespace kpz::growth {

double ScalingFit::closure_gap() const noexcept { return std::abs(z - alpha / beta); }

double ScalingFit::closure_se() const noexcept {
  const double ratio = alpha / beta;
  const double rel = std::hypot(alpha_se / alpha, beta_se / beta);
  return std::hypot(z_se, std::abs(ratio) * rel);
}

GrowthFit fit_growth(const RoughnessSeries& s, double t_lo, double t_hi) {
  std::vector<double> t, w;
  for (std::size_t k = 0; k < s.times.size(); ++k)
    if (s.times[k] >= t_lo && s.times[k] <= t_hi && s.roughness[k] > 0.0) {
      t.push_back(s.times[k]);
      w.push_back(s.roughness[k]);
    }
  if (t.size() < 3)
    throw FitError("growth window [" + std::to_string(t_lo) + ", " + std::to_string(t_hi) + "] for L=" +
                   std::to_string(s.L) + " holds " + std::to_string(t.size()) + " samples; need 3");
  const auto f = stats::loglog_fit(t, w);
  return {f.slope, f.slope_se, f.intercept, t.size()};
}

namespace {

struct SizeFit {
  GrowthFit growth;
  double log_wsat = 0.0;
  double t_x = 0.0;
  double t_sat = 0.0;
};

double mean_log_w_after(const RoughnessSeries& s, double t_from) {
  std::vector<double> lw;
  for (std::size_t k = 0; k < s.times.size(); ++k)
    if (s.times[k] >= t_from && s.roughness[k] > 0.0) lw.push_back(std::log(s.roughness[k]));
  if (lw.empty())
    throw FitError("saturation window t >= " + std::to_string(t_from) + " for L=" + std::to_string(s.L) +
                   " is empty; run longer");
  return stats::mean(lw);
}

std::size_t samples_in(const RoughnessSeries& s, double t_lo, double t_hi) {
  return static_cast<std::size_t>(std::count_if(s.times.begin(), s.times.end(),
                                                [&](double t) { return t >= t_lo && t <= t_hi; }));
}

SizeFit fit_size(const RoughnessSeries& s, const FitOptions& opt) {
  if (s.times.size() < 8) throw FitError("series for L=" + std::to_string(s.L) + " is too short");
  // Start from the last quarter of the (log-spaced) samples as the plateau,
  // fit the growth up to the first time w reaches half of it, and take the
  // intersection of that line with the plateau as the first crossover guess.
  const std::size_t tail = s.times.size() - s.times.size() / 4;
  const double log_wsat = mean_log_w_after(s, s.times[tail]);
  double t_half = s.times.back();
  for (std::size_t k = 0; k < s.times.size(); ++k)
    if (std::log(s.roughness[k]) >= log_wsat - std::log(2.0)) {
      t_half = s.times[k];
      break;
    }
  const auto early = fit_growth(s, s.times.front(), std::max(t_half, s.times[3]));
  if (!(early.beta > 0.0)) throw FitError("non-positive growth exponent for L=" + std::to_string(s.L));
  double t_x = std::exp((log_wsat - early.intercept) / early.beta);
  SizeFit f;
  for (int pass = 0; pass < 2; ++pass) {
    f.growth = fit_growth(s, s.times.front(), std::max(opt.growth_fraction * t_x, s.times[3]));
    f.t_sat = opt.saturation_factor * t_x;
    f.log_wsat = mean_log_w_after(s, f.t_sat);
    if (!(f.growth.beta > 0.0)) throw FitError("non-positive growth exponent for L=" + std::to_string(s.L));
    t_x = std::exp((f.log_wsat - f.growth.intercept) / f.growth.beta);
    f.t_x = t_x;
  }
  return f;
}

}  // namespace

ScalingFit fit_exponents(const std::vector<RoughnessSeries>& series, const FitOptions& opt) {
  if (series.size() < 2) throw FitError("fit_exponents: need at least two lattice sizes");
  if (!(opt.growth_fraction > 0.0) || !(opt.saturation_factor > 0.0) || !(opt.t_min > 0.0))
    throw InvalidArgument("fit_exponents: window parameters must be positive");
  ScalingFit out;
  std::vector<double> Ls;
  double wsum = 0.0, bsum = 0.0;
  std::vector<double> betas;
  for (const auto& s : series) {
    const auto f = fit_size(s, opt);
    out.sizes.push_back(s.L);
    out.crossover.push_back(f.t_x);
    out.saturation.push_back(std::exp(f.log_wsat));
    out.saturation_start.push_back(f.t_sat);
    Ls.push_back(static_cast<double>(s.L));
    const double t_hi = opt.growth_fraction * f.t_x;
    out.beta_windows.emplace_back(opt.t_min, t_hi);
    if (samples_in(s, opt.t_min, t_hi) < 3) {
      out.beta_per_size.push_back(std::nan(""));
      continue;
    }
    const auto g = fit_growth(s, opt.t_min, t_hi);
    out.beta_per_size.push_back(g.beta);
    betas.push_back(g.beta);
    const double se = g.beta_se > 0 ? g.beta_se : 1e-12;
    const double w = 1.0 / (se * se);
    wsum += w;
    bsum += w * g.beta;
  }
  if (betas.empty())
    throw FitError("fit_exponents: no lattice size has three samples in its growth window; run larger sizes");
  out.beta = bsum / wsum;
  // Spread across sizes dominates the regression errors; use it when larger.
  double between = 0.0;
  if (betas.size() > 1) between = stats::standard_error(betas);
  out.beta_se = std::max(std::sqrt(1.0 / wsum), between);
  // Per-size slopes are noisy and t_x = (w_sat/A)^(1/β) amplifies that noise,
  // so the crossover can be relocated on lines sharing the pooled slope.
  for (std::size_t k = 0; opt.shared_slope_crossover && k < series.size(); ++k) {
    const auto& s = series[k];
    const double t_hi = std::max(opt.growth_fraction * out.crossover[k], s.times[3]);
    const double t_lo = samples_in(s, opt.t_min, t_hi) >= 3 ? opt.t_min : s.times.front();
    std::vector<double> offsets;
    for (std::size_t i = 0; i < s.times.size(); ++i)
      if (s.times[i] >= t_lo && s.times[i] <= t_hi && s.roughness[i] > 0.0)
        offsets.push_back(std::log(s.roughness[i]) - out.beta * std::log(s.times[i]));
    const double intercept = stats::mean(offsets);
    out.crossover[k] = std::exp((std::log(out.saturation[k]) - intercept) / out.beta);
  }
  const auto fa = stats::loglog_fit(Ls, out.saturation);
  out.alpha = fa.slope;
  out.alpha_se = fa.slope_se;
  const auto fz = stats::loglog_fit(Ls, out.crossover);
  out.z = fz.slope;
  out.z_se = fz.slope_se;
  return out;
}

Collapse family_vicsek_collapse(const std::vector<RoughnessSeries>& series, double alpha, double z,
                                std::size_t grid_points) {
  if (series.empty()) throw FitError("family_vicsek_collapse: no curves");
  if (grid_points < 2) throw InvalidArgument("family_vicsek_collapse: need at least two grid points");
  Collapse c;
  double lo = -INFINITY, hi = INFINITY;
  std::vector<std::vector<double>> lu(series.size()), ly(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const double Lz = std::pow(static_cast<double>(s.L), z), La = std::pow(static_cast<double>(s.L), alpha);
    std::vector<double> u, y;
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      if (!(s.roughness[i] > 0.0) || !(s.times[i] > 0.0)) continue;
      u.push_back(s.times[i] / Lz);
      y.push_back(s.roughness[i] / La);
      lu[k].push_back(std::log(u.back()));
      ly[k].push_back(std::log(y.back()));
    }
    if (lu[k].size() < 2) throw FitError("family_vicsek_collapse: curve for L=" + std::to_string(s.L) + " is empty");
    lo = std::max(lo, lu[k].front());
    hi = std::min(hi, lu[k].back());
    c.u.push_back(std::move(u));
    c.y.push_back(std::move(y));
  }
  if (!(hi > lo)) throw FitError("family_vicsek_collapse: rescaled time ranges do not overlap");
  double acc = 0.0;
  std::vector<double> vals(series.size());
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double x = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_points - 1);
    for (std::size_t k = 0; k < series.size(); ++k) {
      const auto& X = lu[k];
      const auto& Y = ly[k];
      auto it = std::upper_bound(X.begin(), X.end(), x);
      std::size_t i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - X.begin(), 1, static_cast<std::ptrdiff_t>(X.size()) - 1));
      const double f = (x - X[i - 1]) / (X[i] - X[i - 1]);
      vals[k] = Y[i - 1] + f * (Y[i] - Y[i - 1]);
    }
    const double m = stats::mean(vals);
    for (double v : vals) acc += (v - m) * (v - m);
  }
  c.spread = std::sqrt(acc / static_cast<double>(grid_points * series.size()));
  return c;
}

double TwoRegimeFit::slope_ratio() const noexcept {
  const double late_slope = std::abs(late.slope);
  if (late_slope == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(early.slope) / late_slope;
}

TwoRegimeFit fit_two_regimes(const RoughnessSeries& s, std::size_t min_points) {
  if (min_points < 2) throw InvalidArgument("fit_two_regimes: each regime needs at least two samples");
  if (s.times.size() != s.roughness.size()) throw DimensionError("fit_two_regimes: times and roughness differ in length");
  std::vector<double> x, y;
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    if (!(s.times[k] > 0.0) || !(s.roughness[k] > 0.0)) continue;
    x.push_back(std::log(s.times[k]));
    y.push_back(std::log(s.roughness[k]));
  }
  if (x.size() < 2 * min_points)
    throw FitError("fit_two_regimes: " + std::to_string(x.size()) + " positive samples, need " +
                   std::to_string(2 * min_points));

  auto sse = [](const stats::LinearFit& f, std::span<const double> xs, std::span<const double> ys) {
    double r = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) r += (ys[i] - f(xs[i])) * (ys[i] - f(xs[i]));
    return r;
  };
  const std::span<const double> xs(x), ys(y);
  TwoRegimeFit best;
  best.residual = std::numeric_limits<double>::infinity();
  for (std::size_t b = min_points; b + min_points <= x.size(); ++b) {
    const auto early = stats::linear_fit(xs.first(b), ys.first(b));
    const auto late = stats::linear_fit(xs.subspan(b), ys.subspan(b));
    const double r = sse(early, xs.first(b), ys.first(b)) + sse(late, xs.subspan(b), ys.subspan(b));
    if (r < best.residual) {
      best.early = early;
      best.late = late;
      best.split = b;
      best.residual = r;
    }
  }
  const double ds = best.early.slope - best.late.slope;
  best.crossover = ds != 0.0 ? std::exp((best.late.intercept - best.early.intercept) / ds)
                             : std::sqrt(std::exp(x[best.split - 1] + x[best.split]));
  return best;
}

}  // namespace kpz::growth
