#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kpz/growth.hpp"
#include "kpz/noise.hpp"
#include "kpz/renorm.hpp"
#include "kpz/spectral.hpp"

namespace kpz::renorm {

/// Settings shared by every level of a comparison ladder. The KPZ equation is
/// ∂ₜh = ν∂²ₓh + (λ/2)(∂ₓh)² + ξ_κ − (λ/2)C_κ on the periodic unit interval;
/// its Hopf-Cole partner is dz = ν∂²ₓz dt + (λ/2ν) z dW_κ with h = (2ν/λ) log z.
struct PipelineConfig {
  double nu = 0.5;
  double lambda = 1.0;
  double chi = 0.0;  ///< Robin parameter; 0 selects χ = Δx on every level
  double final_time = 1.0 / 64.0;
  std::size_t samples = 8;          ///< equally spaced record times in (0, T]
  std::size_t realizations = 20;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double tol = 1e-10;
  std::size_t max_iters = 10000;
  std::size_t heat_min_steps = 4096;  ///< heat solver uses max(this, MHFE step count) steps
};

struct Level {
  std::size_t n = 8;  ///< MHFE cells and spectral modes
  double kappa = 1.0;
};

/// N = n0/κ for each κ.
std::vector<Level> ladder_levels(std::size_t n0, const std::vector<double>& kappas);

struct LevelResult {
  Level level;
  RenormConstants constants;
  ShiftEstimate shift;  ///< unrenormalised KPZ against Hopf-Cole
  double mean_plain = 0.0, mean_plain_se = 0.0;      ///< spatial mean of h(T) without −C
  double mean_renorm = 0.0, mean_renorm_se = 0.0;    ///< with −(λ/2)C_κ
  std::vector<std::vector<double>> corrected;  ///< h(T) − (λ/2)ĈT per realization
  std::vector<std::vector<double>> renormalized;  ///< renormalised h(T) per realization
  std::vector<std::vector<double>> hopf_cole;     ///< (2ν/λ) log z(T) per realization
  std::size_t mhfe_steps = 0, heat_steps = 0, max_iterations = 0;
};

struct ComparisonReport {
  noise::MollifierKind kind = noise::MollifierKind::bump;
  double final_time = 0.0;
  std::uint64_t noise_key = 0;
  std::vector<LevelResult> levels;

  LevelProfiles renormalized_profiles(std::size_t level) const;
};

/// Runs the heat and KPZ solvers on every level with noise nested in the
/// finest level's path: MHFE steps Δt = Δx³, heat steps Δt ≤ Δx².
ComparisonReport run_comparison(const std::vector<Level>& levels, noise::MollifierKind kind,
                                const PipelineConfig& config);

/// Monte Carlo distance between the shift-corrected final profiles of two
/// ladders at each level.
std::vector<double> cross_mollifier_distance(const ComparisonReport& a, const ComparisonReport& b);

/// Errors between consecutive levels of the renormalised solutions.
std::vector<double> ladder_errors(const ComparisonReport& report);

/// Roughness of h = log z for the spectral stochastic heat equation
/// dz = ν∂²ₓz dt + λ z dW with z(0) ≡ 1 on the periodic unit interval.
struct HeatRoughnessConfig {
  std::size_t modes = 128;
  double nu = 1.0;
  double lambda = 1.0;
  double final_time = 1.0;
  std::size_t steps = 16384;
  spectral::Scheme scheme = spectral::Scheme::milstein;
  double first_time = 1e-3;        ///< earliest record time
  std::size_t per_decade = 10;     ///< record times per decade up to final_time
  std::size_t realizations = 50;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

/// w(t) = (mean over realizations of w_r(t)²)^{1/2}, w_r the spatial RMS of
/// log z about its mean on the stepper grid; mean_height holds the ensemble
/// mean of the spatial mean. Record times are rounded to whole steps.
growth::RoughnessSeries hopf_cole_roughness(const HeatRoughnessConfig& config);

}  // namespace kpz::renorm
