#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kpz/matrix.hpp"
#include "kpz/noise.hpp"

namespace kpz::renorm {

/// Pointwise natural logarithm; throws PositivityError at the first z ≤ 0.
std::vector<double> hopf_cole(std::span<const double> z);

/// (1/κ) ∫ φ² for the mollifier's profile.
double renorm_c1(const noise::Mollifier& phi);
/// (1/κ) ∫_{−r}^{r} profile² for an arbitrary even test kernel supported in [−r, r].
double renorm_c1(const std::function<double(double)>& profile, double radius, double kappa);

/// (4π/√3)|log κ|.
double c2_leading(double kappa);

/// −8 ∫_{ℝ₊} ∫_ℝ x φ'(y) φ(y) φ²(y) log φ(y) / (x² − xy + y²) dx dy.
/// The inner integral only converges as a symmetric principal value; it is
/// evaluated by pairing x with −x and mapping x = s/(1−s).
double c2_correction(const noise::Mollifier& phi);
/// Closed form of the same principal value for any φ decreasing from 1 to 0
/// on [0, ∞): −π/(2√3).
double c2_correction_closed_form();

struct C2C3 {
  double c2 = 0.0;
  double c3 = 0.0;
  double leading = 0.0;
  double correction = 0.0;
};
/// c2 = leading + correction, c3 = −c2/4. Requires 0 < κ ≤ 1.
C2C3 renorm_c2_c3(const noise::Mollifier& phi);

struct RenormConstants {
  double kappa = 0.0;
  noise::MollifierKind kind = noise::MollifierKind::bump;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double c_total = 0.0;
};
RenormConstants renorm_constants(const noise::Mollifier& phi);

/// Nodal forcing ξ_κ(t_n, x_i) − scale·C_κ on the grid x_i = i/points, where
/// ξ_κ is the spectrally mollified white noise of `raw`.
Matrix renormalized_forcing(const noise::NoiseRealization& raw, const noise::Mollifier& phi,
                            const RenormConstants& constants, std::size_t points, double scale = 1.0);

/// Mean difference between two families of trajectories and the fitted shift.
struct ShiftEstimate {
  double c_hat = 0.0;
  double c_hat_se = 0.0;
  double residual = 0.0;           ///< final-time distance after removing the shift
  std::vector<double> mean_gap;    ///< ⟨mean_x(h_kpz − h_hc)⟩ per sample time
};

/// h[r][k] is realization r's profile at times[k]. Ĉ fits mean_x(h_kpz − h_hc)
/// against (λ/2)·t through the origin; residual is the Monte Carlo norm of
/// h_kpz(T) − (λ/2)ĈT − h_hc(T).
ShiftEstimate estimate_shift(const std::vector<double>& times,
                             const std::vector<std::vector<std::vector<double>>>& h_kpz,
                             const std::vector<std::vector<std::vector<double>>>& h_hc, double lambda);

/// Final profiles of one resolution level, tagged with the noise they came from.
struct LevelProfiles {
  std::size_t n = 0;               ///< cells
  double kappa = 0.0;
  std::uint64_t noise_key = 0;     ///< identifies the shared fine noise path
  std::vector<std::vector<double>> profiles;  ///< per realization, n cell values on [0, 1]
};

/// (E ∫₀¹ |h_fine − h_coarse|²)^{1/2}, the fine profile averaged onto the
/// coarse cells. Throws ConfigError when the levels do not share a noise path.
double kappa_refinement_error(const LevelProfiles& coarse, const LevelProfiles& fine);

/// Average blocks of `fine.size()/coarse_size` neighbouring cells.
std::vector<double> restrict_cells(std::span<const double> fine, std::size_t coarse_size);

}  // namespace kpz::renorm
