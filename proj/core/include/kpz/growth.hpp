#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kpz/rng.hpp"
#include "kpz/stats.hpp"

namespace kpz::growth {

enum class Model { ballistic, random, random_relax };
const char* to_string(Model m) noexcept;
Model model_from_string(const std::string& name);

/// Periodic one-dimensional lattice of column heights.
struct Lattice {
  explicit Lattice(std::size_t L);

  std::vector<std::int64_t> heights;
  std::uint64_t deposited = 0;

  std::size_t size() const noexcept { return heights.size(); }
};

/// h(i) ← max(h(i−1), h(i)+1, h(i+1)).
void deposit_bd(Lattice& lat, std::size_t i);
/// h(i) ← h(i)+1.
void deposit_rd(Lattice& lat, std::size_t i);
/// Lands on the lowest of {i−1, i, i+1}: stays at i on any tie with i, and
/// picks uniformly between the two neighbours when they tie below h(i).
void deposit_rd_relax(Lattice& lat, std::size_t i, noise::RngStream& rng);
void deposit(Model model, Lattice& lat, std::size_t i, noise::RngStream& rng);

double mean_height(std::span<const std::int64_t> h);
/// sqrt((1/L) Σ (h_i − h̄)²).
double roughness(std::span<const std::int64_t> h);

/// Time-indexed interface statistics; time is measured in monolayers.
struct RoughnessSeries {
  std::size_t L = 0;
  std::vector<double> times;
  std::vector<double> mean_height;
  std::vector<double> roughness;
};

/// Statistics of stored snapshots.
RoughnessSeries roughness_stats(const std::vector<std::vector<std::int64_t>>& snapshots,
                                const std::vector<double>& times);

/// Roughly geometric sampling times in monolayers, rounded to whole deposits
/// on a lattice of size L and deduplicated.
std::vector<double> geometric_times(double t_min, double t_max, std::size_t points_per_decade, std::size_t L);

/// One run from a flat interface, sampled at `times`.
RoughnessSeries simulate(Model model, std::size_t L, const std::vector<double>& times, noise::RngStream rng);

/// Ensemble average over independent runs: mean height, w = sqrt(⟨w²⟩) and the
/// standard error of ⟨w²⟩ at every sample time.
struct EnsembleSeries {
  RoughnessSeries series;
  std::vector<double> w2_stderr;
  std::size_t runs = 0;
};

EnsembleSeries simulate_ensemble(Model model, std::size_t L, const std::vector<double>& times, std::size_t runs,
                                 std::uint64_t seed, unsigned workers = 1);

struct ScalingFit {
  double alpha = 0.0, alpha_se = 0.0;
  double beta = 0.0, beta_se = 0.0;
  double z = 0.0, z_se = 0.0;
  std::vector<std::size_t> sizes;
  std::vector<double> crossover;     ///< t_x per size
  std::vector<double> saturation;    ///< w_sat per size
  std::vector<double> beta_per_size;
  std::vector<std::pair<double, double>> beta_windows;  ///< [t_lo, t_hi] per size
  std::vector<double> saturation_start;                  ///< 4·t_x per size

  /// |z − α/β| against the propagated standard errors of z and α/β.
  double closure_gap() const noexcept;
  double closure_se() const noexcept;
};

struct FitOptions {
  /// Start of the β window. Models with an uncorrelated early transient
  /// (ballistic deposition behaves like random deposition for the first few
  /// layers) need it later than the first sample.
  double t_min = 1.0;
  double growth_fraction = 0.25;   ///< β window ends at growth_fraction·t_x
  double saturation_factor = 4.0;  ///< w_sat averaged over t ≥ saturation_factor·t_x
  /// Relocate every t_x on a growth line with the pooled β and a per-size
  /// intercept instead of the per-size slope.
  bool shared_slope_crossover = false;
};

/// w_sat from t ≥ 4·t_x and t_x from the intersection of the plateau with the
/// growth line fitted over [t_first, t_x/4] (located twice). α is the slope of
/// log w_sat against log L and z that of log t_x against log L. β is the
/// inverse-variance mean of the per-size slopes over [t_min, t_x/4]; sizes
/// with fewer than three samples there are reported as NaN and skipped.
ScalingFit fit_exponents(const std::vector<RoughnessSeries>& series, const FitOptions& options = {});

/// Slope of log w against log t over t ∈ [t_lo, t_hi].
struct GrowthFit {
  double beta = 0.0, beta_se = 0.0, intercept = 0.0;
  std::size_t points = 0;
};
GrowthFit fit_growth(const RoughnessSeries& s, double t_lo, double t_hi);

/// Curves rescaled to u = t/L^z, y = w/L^α, and the RMS spread of log y
/// across curves on a shared log-u grid over the overlap of their ranges.
struct Collapse {
  std::vector<std::vector<double>> u, y;
  double spread = 0.0;
};
Collapse family_vicsek_collapse(const std::vector<RoughnessSeries>& series, double alpha, double z,
                                std::size_t grid_points = 64);

/// Two straight lines in log w against log t, split at the sample index that
/// minimises the total squared residual. Each piece keeps at least
/// `min_points` samples.
struct TwoRegimeFit {
  stats::LinearFit early, late;
  std::size_t split = 0;   ///< first sample of the late regime
  double crossover = 0.0;  ///< time where the two lines meet
  double residual = 0.0;   ///< total squared residual in log w

  /// |early slope| / |late slope|; infinite for a perfectly flat late regime.
  double slope_ratio() const noexcept;
};
TwoRegimeFit fit_two_regimes(const RoughnessSeries& s, std::size_t min_points = 4);

}  // namespace kpz::growth
