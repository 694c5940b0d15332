#include "kpz/renorm.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "kpz/basis.hpp"
#include "kpz/errors.hpp"
#include "kpz/spectral.hpp"
#include "kpz/stats.hpp"

namespace kpz::renorm {
namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double kSqrt3 = std::numbers::sqrt3;

template <class F>
double integrate(F f, double a, double b, const char* what) {
  double err = 0.0;
  const double v = gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-12, &err);
  if (!std::isfinite(v) || err > 1e-8 * std::max(1.0, std::abs(v)))
    throw NumericError(std::string(what) + ": quadrature did not converge (estimate " + std::to_string(v) +
                       ", error " + std::to_string(err) + ")");
  return v;
}

}  // namespace

std::vector<double> hopf_cole(std::span<const double> z) {
  std::vector<double> h(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(z[i] > 0.0)) throw PositivityError(i, z[i]);
    h[i] = std::log(z[i]);
  }
  return h;
}

double renorm_c1(const std::function<double(double)>& profile, double radius, double kappa) {
  if (!(kappa > 0.0)) throw InvalidArgument("renorm_c1: kappa must be positive");
  auto f = [&](double u) {
    const double p = profile(u);
    return p * p;
  };
  double integral;
  if (std::isfinite(radius)) {
    integral = 2.0 * integrate(f, 0.0, radius, "renorm_c1");
  } else {
    integral = 2.0 * integrate(f, 0.0, std::numeric_limits<double>::infinity(), "renorm_c1");
  }
  return integral / kappa;
}

double renorm_c1(const noise::Mollifier& phi) {
  return renorm_c1([&](double u) { return phi.profile(u); }, phi.support_radius(), phi.kappa());
}

double c2_leading(double kappa) {
  if (!(kappa > 0.0)) throw InvalidArgument("c2_leading: kappa must be positive");
  return 4.0 * std::numbers::pi / kSqrt3 * std::abs(std::log(kappa));
}

double c2_correction(const noise::Mollifier& phi) {
  // Inner principal value: ∫₀^∞ [x/(x²−xy+y²) − x/(x²+xy+y²)] dx = ∫₀^∞ 2x²y / ((x²+y²)² − x²y²) dx.
  auto inner = [](double y) {
    auto g = [y](double s) {
      if (s >= 1.0) return 0.0;
      // Scale by y so the integrand has the same shape for every y.
      const double x = y * s / (1.0 - s);
      const double jac = y / ((1.0 - s) * (1.0 - s));
      const double x2 = x * x, y2 = y * y;
      const double q = x2 + y2;
      return 2.0 * x2 * y / (q * q - x2 * y2) * jac;
    };
    return integrate(g, 0.0, 1.0, "c2_correction inner integral");
  };
  auto outer = [&](double y) {
    const double p = phi.profile(y);
    if (!(p > 0.0) || y <= 0.0) return 0.0;
    return phi.profile_derivative(y) * p * p * p * std::log(p) * inner(y);
  };
  const double radius = phi.support_radius();
  const double hi = std::isfinite(radius) ? radius : 40.0;
  return -8.0 * integrate(outer, 0.0, hi, "c2_correction outer integral");
}

double c2_correction_closed_form() { return -std::numbers::pi / (2.0 * kSqrt3); }

C2C3 renorm_c2_c3(const noise::Mollifier& phi) {
  if (!(phi.kappa() <= 1.0)) throw InvalidArgument("renorm_c2_c3: kappa must lie in (0, 1]");
  C2C3 r;
  r.leading = c2_leading(phi.kappa());
  r.correction = c2_correction(phi);
  r.c2 = r.leading + r.correction;
  r.c3 = -r.c2 / 4.0;
  return r;
}

RenormConstants renorm_constants(const noise::Mollifier& phi) {
  RenormConstants c;
  c.kappa = phi.kappa();
  c.kind = phi.kind();
  c.c1 = renorm_c1(phi);
  const auto c23 = renorm_c2_c3(phi);
  c.c2 = c23.c2;
  c.c3 = c23.c3;
  c.c_total = c.c1 + c.c2 + c.c3;
  return c;
}

Matrix renormalized_forcing(const noise::NoiseRealization& raw, const noise::Mollifier& phi,
                            const RenormConstants& constants, std::size_t points, double scale) {
  if (constants.kappa != phi.kappa() || constants.kind != phi.kind())
    throw ConfigError("kappa", "renormalization constants were computed for kappa=" +
                                   std::to_string(constants.kappa) + " but the noise is mollified at kappa=" +
                                   std::to_string(phi.kappa()));
  const auto mollified = noise::mollify_spectral(raw, phi);
  const auto table = BasisTable::uniform(TrigBasis(raw.modes()), points);
  Matrix f = noise::white_noise_field(mollified, table);
  const double c = scale * constants.c_total;
  for (double& v : f.data()) v -= c;
  return f;
}

ShiftEstimate estimate_shift(const std::vector<double>& times,
                             const std::vector<std::vector<std::vector<double>>>& h_kpz,
                             const std::vector<std::vector<std::vector<double>>>& h_hc, double lambda) {
  if (h_kpz.empty()) throw InvalidArgument("estimate_shift: no realizations");
  if (h_kpz.size() != h_hc.size()) throw DimensionError("estimate_shift: realization counts differ");
  const std::size_t R = h_kpz.size(), K = times.size();
  ShiftEstimate est;
  est.mean_gap.assign(K, 0.0);
  std::vector<double> x(K);
  std::vector<std::vector<double>> gaps(R, std::vector<double>(K));
  for (std::size_t r = 0; r < R; ++r) {
    if (h_kpz[r].size() != K || h_hc[r].size() != K) throw DimensionError("estimate_shift: one profile per time");
    for (std::size_t k = 0; k < K; ++k) {
      const auto& a = h_kpz[r][k];
      const auto& b = h_hc[r][k];
      if (a.size() != b.size() || a.empty()) throw DimensionError("estimate_shift: profiles on different grids");
      std::vector<double> d(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
      gaps[r][k] = stats::mean(d);
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    x[k] = 0.5 * lambda * times[k];
    std::vector<double> col(R);
    for (std::size_t r = 0; r < R; ++r) col[r] = gaps[r][k];
    est.mean_gap[k] = stats::mean(col);
  }
  double sxx = 0;
  for (double v : x) sxx += v * v;
  if (!(sxx > 0.0)) throw FitError("estimate_shift: all sample times are zero");
  // Per-realization slopes give the spread of the estimate.
  std::vector<double> slopes(R);
  for (std::size_t r = 0; r < R; ++r) {
    double sxy = 0;
    for (std::size_t k = 0; k < K; ++k) sxy += x[k] * gaps[r][k];
    slopes[r] = sxy / sxx;
  }
  est.c_hat = stats::mean(slopes);
  est.c_hat_se = R > 1 ? stats::standard_error(slopes) : 0.0;

  const double shift = est.c_hat * x[K - 1];
  std::vector<std::vector<double>> a(R), b(R);
  for (std::size_t r = 0; r < R; ++r) {
    a[r] = h_kpz[r][K - 1];
    for (double& v : a[r]) v -= shift;
    b[r] = h_hc[r][K - 1];
  }
  est.residual = spectral::mc_error_norm(a, b);
  return est;
}

std::vector<double> restrict_cells(std::span<const double> fine, std::size_t coarse_size) {
  if (coarse_size == 0 || fine.size() % coarse_size != 0)
    throw DimensionError("restrict_cells: fine size " + std::to_string(fine.size()) + " is not a multiple of " +
                         std::to_string(coarse_size));
  const std::size_t f = fine.size() / coarse_size;
  std::vector<double> out(coarse_size, 0.0);
  for (std::size_t i = 0; i < fine.size(); ++i) out[i / f] += fine[i];
  for (double& v : out) v /= static_cast<double>(f);
  return out;
}

double kappa_refinement_error(const LevelProfiles& coarse, const LevelProfiles& fine) {
  if (coarse.noise_key != fine.noise_key)
    throw ConfigError("noise", "levels were driven by different noise paths; the coarse noise must be nested in the fine one");
  if (coarse.profiles.size() != fine.profiles.size())
    throw DimensionError("kappa_refinement_error: realization counts differ");
  std::vector<std::vector<double>> restricted(fine.profiles.size());
  for (std::size_t r = 0; r < fine.profiles.size(); ++r) restricted[r] = restrict_cells(fine.profiles[r], coarse.n);
  return spectral::mc_error_norm(coarse.profiles, restricted);
}

}  // namespace kpz::renorm
