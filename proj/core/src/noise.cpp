#include "kpz/noise.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "kpz/errors.hpp"

namespace kpz::noise {
namespace {

// Position of draw (step n, mode j) in the stream; independent of the matrix shape.
constexpr std::uint64_t kModeStride = std::uint64_t{1} << 24;

constexpr std::uint64_t draw_index(std::uint64_t n, std::uint64_t j) noexcept { return n * kModeStride + j; }

void check_shape(std::size_t n_time, std::size_t j_modes, double dt) {
  if (n_time == 0 || j_modes == 0) throw InvalidArgument("noise: n_time and j_modes must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("noise: dt must be positive");
  if (j_modes >= kModeStride) throw InvalidArgument("noise: too many modes");
}

}  // namespace

NoiseRealization draw_gaussian_matrix(const RngStream& stream, std::size_t n_time,
                                      std::size_t j_modes, double dt) {
  return draw_nested(stream, n_time, j_modes, dt, 1);
}

NoiseRealization draw_nested(const RngStream& stream, std::size_t n_time, std::size_t j_modes,
                             double dt, std::size_t substeps) {
  check_shape(n_time, j_modes, dt);
  if (substeps == 0) throw InvalidArgument("draw_nested: substeps must be positive");
  NoiseRealization out{dt, Matrix(n_time, j_modes)};
  const double scale = std::sqrt(dt / static_cast<double>(substeps));
  for (std::size_t n = 0; n < n_time; ++n) {
    auto row = out.increments.row(n);
    for (std::size_t s = 0; s < substeps; ++s) {
      const std::uint64_t fine = static_cast<std::uint64_t>(n) * substeps + s;
      for (std::size_t j = 0; j < j_modes; ++j) row[j] += scale * stream.gaussian_at(draw_index(fine, j));
    }
  }
  return out;
}

void accumulate_row(const RngStream& stream, std::uint64_t fine_step, double scale, std::span<double> row) {
  if (row.size() >= kModeStride) throw InvalidArgument("noise: too many modes");
  for (std::size_t j = 0; j < row.size(); ++j) row[j] += scale * stream.gaussian_at(draw_index(fine_step, j));
}

NoiseRealization coarsen(const NoiseRealization& fine, std::size_t j_modes, std::size_t time_factor) {
  if (j_modes == 0 || j_modes > fine.modes()) throw DimensionError("coarsen: mode count out of range");
  if (time_factor == 0 || fine.n_time() % time_factor != 0)
    throw DimensionError("coarsen: time factor must divide the step count");
  NoiseRealization out{fine.dt * static_cast<double>(time_factor),
                       Matrix(fine.n_time() / time_factor, j_modes)};
  for (std::size_t n = 0; n < fine.n_time(); ++n) {
    auto src = fine.step(n);
    auto dst = out.increments.row(n / time_factor);
    for (std::size_t j = 0; j < j_modes; ++j) dst[j] += src[j];
  }
  return out;
}

Matrix white_noise_field(const NoiseRealization& realization, const BasisTable& table) {
  if (table.modes() != realization.modes())
    throw DimensionError("white_noise_field: basis has " + std::to_string(table.modes()) +
                         " modes, realization has " + std::to_string(realization.modes()));
  Matrix field(realization.n_time(), table.points());
  const double inv_dt = 1.0 / realization.dt;
  for (std::size_t n = 0; n < realization.n_time(); ++n) {
    auto out = field.row(n);
    table.synthesize(realization.step(n), out);
    for (double& v : out) v *= inv_dt;
  }
  return field;
}

Mollifier::Mollifier(MollifierKind kind, double kappa) : kind_(kind), kappa_(kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("Mollifier: kappa must be positive");
}

double Mollifier::profile(double u) const noexcept {
  switch (kind_) {
    case MollifierKind::bump: {
      const double u2 = u * u;
      if (u2 >= 1.0) return 0.0;
      return std::exp(1.0 - 1.0 / (1.0 - u2));
    }
    case MollifierKind::gaussian:
      return std::exp(-0.5 * u * u);
  }
  return 0.0;
}

double Mollifier::profile_derivative(double u) const noexcept {
  switch (kind_) {
    case MollifierKind::bump: {
      const double u2 = u * u;
      if (u2 >= 1.0) return 0.0;
      const double d = 1.0 - u2;
      return -2.0 * u / (d * d) * profile(u);
    }
    case MollifierKind::gaussian:
      return -u * profile(u);
  }
  return 0.0;
}

double Mollifier::normalization() const noexcept {
  return kind_ == MollifierKind::bump ? std::numbers::e : 1.0;
}

double Mollifier::support_radius() const noexcept {
  return kind_ == MollifierKind::bump ? 1.0 : std::numeric_limits<double>::infinity();
}

const char* to_string(MollifierKind kind) noexcept {
  return kind == MollifierKind::bump ? "bump" : "gaussian";
}

MollifierKind mollifier_kind_from_string(const std::string& name) {
  if (name == "bump") return MollifierKind::bump;
  if (name == "gaussian") return MollifierKind::gaussian;
  throw InvalidArgument("unknown mollifier kind '" + name + "'");
}

NoiseRealization mollify_spectral(const NoiseRealization& realization, const Mollifier& phi) {
  NoiseRealization out = realization;
  std::vector<double> factor(realization.modes());
  for (std::size_t j = 0; j < factor.size(); ++j) factor[j] = phi(TrigBasis::wavenumber(j));
  for (std::size_t n = 0; n < out.n_time(); ++n) {
    auto row = out.increments.row(n);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] *= factor[j];
  }
  return out;
}

std::vector<double> mollify_convolution(std::span<const double> field, const Mollifier& phi, double length) {
  const std::size_t m = field.size();
  if (m == 0) throw InvalidArgument("mollify_convolution: empty field");
  if (!(length > 0.0)) throw InvalidArgument("mollify_convolution: domain length must be positive");
  const double kappa = phi.kappa();
  const bool compact = std::isfinite(phi.support_radius());
  if (compact && 2.0 * phi.support_radius() * kappa > length)
    throw InvalidArgument("mollify_convolution: kernel support wider than the domain");

  const double h = length / static_cast<double>(m);
  // Kernel weight per periodic offset d; gaussian images summed until negligible.
  const long images = compact ? 0 : static_cast<long>(std::ceil(10.0 * kappa / length)) + 1;
  std::vector<double> w(m, 0.0);
  double mass = 0.0;
  for (std::size_t d = 0; d < m; ++d) {
    const double offset = static_cast<double>(d) * h;
    const double centred = offset > 0.5 * length ? offset - length : offset;
    double v = 0.0;
    for (long p = -images; p <= images; ++p) v += phi.profile((centred + static_cast<double>(p) * length) / kappa);
    w[d] = v;
    mass += v;
  }
  if (!(mass > 0.0)) throw InvalidArgument("mollify_convolution: kernel has no mass on this grid");
  for (double& v : w) v /= mass;

  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t d = 0; d < m; ++d) {
      if (w[d] == 0.0) continue;
      acc += w[d] * field[(i + m - d) % m];
    }
    out[i] = acc;
  }
  return out;
}

double gaussian_c0(double k) {
  if (!(k > 0.0)) throw InvalidArgument("gaussian_c0: k must be positive");
  return 0.5 / (k * std::sqrt(std::numbers::pi));
}

double gaussian_c0_quadrature(double k) {
  if (!(k > 0.0)) throw InvalidArgument("gaussian_c0_quadrature: k must be positive");
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * k * k);
  auto g2 = [&](double u) {
    const double g = norm * std::exp(-u * u / (2.0 * k * k));
    return g * g;
  };
  const double inf = std::numeric_limits<double>::infinity();
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g2, -inf, inf, 15, 1e-13);
}

}  // namespace kpz::noise
