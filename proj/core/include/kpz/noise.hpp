#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kpz/basis.hpp"
#include "kpz/matrix.hpp"
#include "kpz/rng.hpp"

namespace kpz::noise {

/// Brownian increments of a truncated cylindrical Wiener process.
///
/// Row n holds the increments over [t_n, t_{n+1}); column j is the
/// increment of the scalar Brownian motion attached to basis mode j.
/// Each entry is N(0, dt).
struct NoiseRealization {
  double dt = 0.0;
  Matrix increments;

  std::size_t n_time() const noexcept { return increments.rows(); }
  std::size_t modes() const noexcept { return increments.cols(); }
  std::span<const double> step(std::size_t n) const noexcept { return increments.row(n); }

  friend bool operator==(const NoiseRealization&, const NoiseRealization&) = default;
};

/// i.i.d. N(0, dt) draws; entry (n, j) depends only on (stream, n, j).
NoiseRealization draw_gaussian_matrix(const RngStream& stream, std::size_t n_time,
                                      std::size_t j_modes, double dt);

/// Same underlying path as draw_gaussian_matrix(stream, n_time*substeps, j_modes,
/// dt/substeps), with every `substeps` consecutive rows summed. Runs at different
/// time steps and mode counts built from one stream therefore share the path.
NoiseRealization draw_nested(const RngStream& stream, std::size_t n_time, std::size_t j_modes,
                             double dt, std::size_t substeps);

/// Adds scale·N(0,1) for fine step `fine_step` to every entry of `row`; the
/// draws match those behind draw_gaussian_matrix and draw_nested.
void accumulate_row(const RngStream& stream, std::uint64_t fine_step, double scale, std::span<double> row);

/// Keep the first j_modes columns and sum blocks of `time_factor` rows.
NoiseRealization coarsen(const NoiseRealization& fine, std::size_t j_modes, std::size_t time_factor);

/// Pointwise white-noise field ζ(t_n, x_i) = Σ_j ΔW_j(n) χ_j(x_i) / dt.
Matrix white_noise_field(const NoiseRealization& realization, const BasisTable& table);

enum class MollifierKind { bump, gaussian };

/// Even smooth kernel profile with φ(0) = 1, evaluated at scale κ as φ(κ·u).
///
/// bump:     φ(u) = e · exp(−1/(1−u²)) for |u| < 1, else 0
/// gaussian: φ(u) = exp(−u²/2)
class Mollifier {
public:
  Mollifier(MollifierKind kind, double kappa);

  MollifierKind kind() const noexcept { return kind_; }
  double kappa() const noexcept { return kappa_; }
  Mollifier with_kappa(double kappa) const { return {kind_, kappa}; }

  /// Unscaled profile φ(u).
  double profile(double u) const noexcept;
  double profile_derivative(double u) const noexcept;
  /// Scaled profile φ(κu).
  double operator()(double u) const noexcept { return profile(kappa_ * u); }
  /// Factor applied to the unnormalized textbook form to get φ(0) = 1.
  double normalization() const noexcept;
  /// Radius of the profile support in u (infinite for gaussian).
  double support_radius() const noexcept;

  friend bool operator==(const Mollifier&, const Mollifier&) = default;

private:
  MollifierKind kind_;
  double kappa_;
};

const char* to_string(MollifierKind kind) noexcept;
MollifierKind mollifier_kind_from_string(const std::string& name);

/// Column j multiplied by φ(κ·n_j), n_j the wavenumber of mode j.
NoiseRealization mollify_spectral(const NoiseRealization& realization, const Mollifier& phi);

/// Periodic convolution of samples on the uniform grid x_i = i·L/M with the
/// kernel u ↦ φ(u/κ) normalised to unit discrete mass. Compact kernels wider
/// than the domain are rejected; gaussian kernels are periodised.
std::vector<double> mollify_convolution(std::span<const double> field, const Mollifier& phi,
                                        double length = 1.0);

/// C_k(0) = ∫ G_k(u)² du = 1/(2k√π) for the Gaussian G_k of standard deviation k.
double gaussian_c0(double k);
/// Same quantity by adaptive quadrature of G_k².
double gaussian_c0_quadrature(double k);

// Replay files. CSV: header line "dt,modes,n_time", a value line, then one
// row of increments per time step. Binary: "KPZN", u64 n_time, u64 modes,
// f64 dt, then row-major f64 values (little endian).
void write_csv(const std::filesystem::path& path, const NoiseRealization& realization);
NoiseRealization read_csv(const std::filesystem::path& path);
void write_binary(const std::filesystem::path& path, const NoiseRealization& realization);
NoiseRealization read_binary(const std::filesystem::path& path);
/// Dispatch on extension: ".csv" text, anything else binary.
NoiseRealization read_replay(const std::filesystem::path& path);

}  // namespace kpz::noise
