#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kpz/basis.hpp"
#include "kpz/fourier.hpp"
#include "kpz/noise.hpp"

namespace kpz::spectral {

/// Diagonal operator A = −ν·diag(λ_j) on the trigonometric basis.
struct SpectralOperator {
  std::vector<double> eigenvalues;
  double nu = 1.0;

  /// Periodic Laplacian on the first `modes` trigonometric modes.
  static SpectralOperator periodic(std::size_t modes, double nu);
  std::size_t size() const noexcept { return eigenvalues.size(); }
};

/// Coefficients on the first J basis modes.
struct SpectralField {
  std::vector<double> coeffs;

  std::size_t size() const noexcept { return coeffs.size(); }
  static SpectralField constant(std::size_t modes, double value);
  friend bool operator==(const SpectralField&, const SpectralField&) = default;
};

/// Map from grid values to grid values.
using GridMap = std::function<void(std::span<const double> u, std::span<double> out)>;

/// Noise coefficient G. Either a pointwise function g(u) with derivative g'(u),
/// which the Milstein correction needs, or a general field map returning the
/// multiplier field.
class Diffusion {
public:
  static Diffusion none();
  static Diffusion multiplicative(double lambda);
  static Diffusion pointwise(std::function<double(double)> g, std::function<double(double)> dg);
  static Diffusion general(GridMap multiplier);

  bool is_zero() const noexcept { return kind_ == Kind::zero; }
  bool is_pointwise() const noexcept { return kind_ == Kind::pointwise; }
  /// out[i] = G(u)(x_i).
  void multiplier(std::span<const double> u, std::span<double> out) const;
  /// out[i] = g'(u_i)·g(u_i); pointwise kind only.
  void milstein_factor(std::span<const double> u, std::span<double> out) const;

private:
  enum class Kind { zero, pointwise, general };
  Kind kind_ = Kind::zero;
  std::function<double(double)> g_, dg_;
  GridMap map_;
};

struct SemilinearProblem {
  SpectralOperator op;
  GridMap drift;  ///< F on grid values; empty means F ≡ 0
  Diffusion diffusion;
  /// √q_j of the Q-Wiener process W = Σ √q_j β_j χ_j; empty means q_j = 1.
  /// Steppers take the increments of the β_j and apply the weights themselves.
  std::vector<double> noise_weights;
};

/// dX = ν A X dt + λ X dW on the periodic unit interval.
SemilinearProblem heat_problem(std::size_t modes, double nu, double lambda);

enum class Scheme { euler_galerkin, lord_rougemont, milstein };
const char* to_string(Scheme s) noexcept;
Scheme scheme_from_string(const std::string& name);

/// Reusable stepper for one problem. Products are formed on a uniform grid of
/// `grid_points` nodes (default 2J + 2) and projected back.
class SpectralStepper {
public:
  explicit SpectralStepper(SemilinearProblem problem, std::size_t grid_points = 0);

  const SemilinearProblem& problem() const noexcept { return problem_; }
  const BasisTable& grid() const noexcept { return table_; }
  std::size_t modes() const noexcept { return problem_.op.size(); }

  /// Advance `state` in place over one step with increments dW (one per mode).
  void step(Scheme scheme, SpectralField& state, std::span<const double> dw, double dt);

  /// Grid density of the Milstein correction ½ g'(u)g(u)((ΔW)² − Δt Σ_j q_j χ_j²).
  std::vector<double> milstein_correction(const SpectralField& state, std::span<const double> dw,
                                          double dt) const;

  /// Coefficients of a function sampled on this stepper's grid.
  SpectralField project(const std::function<double(double)>& f) const;

private:
  void update_factors(double dt);
  std::span<const double> weighted(std::span<const double> dw);

  SemilinearProblem problem_;
  BasisTable table_;
  TrigTransform fft_;
  std::vector<double> sum_sq_;
  double cached_dt_ = -1.0;
  std::vector<double> implicit_, exponential_;
  std::vector<double> u_, w_, acc_, tmp_, proj_, weighted_;
};

SpectralField step_euler_galerkin(const SpectralField& state, const SemilinearProblem& problem,
                                  std::span<const double> dw, double dt);
SpectralField step_lord_rougemont(const SpectralField& state, const SemilinearProblem& problem,
                                  std::span<const double> dw, double dt);
SpectralField step_milstein(const SpectralField& state, const SemilinearProblem& problem,
                            std::span<const double> dw, double dt);

struct Trajectory {
  double dt = 0.0;
  std::vector<SpectralField> states;  ///< states[n] at time n·dt
};

/// Every state from the initial one to the last noise step.
Trajectory integrate(const SemilinearProblem& problem, Scheme scheme, const SpectralField& initial,
                     const noise::NoiseRealization& noise);
/// Final state only.
SpectralField integrate_final(const SemilinearProblem& problem, Scheme scheme,
                              const SpectralField& initial, const noise::NoiseRealization& noise);

/// sqrt(mean over realizations of ∫|a − b|²), the integral by the periodic
/// rectangle rule on the shared grid.
double mc_error_norm(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b);

struct RefinementOptions {
  double final_time = 1.0;
  std::size_t realizations = 50;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  /// Step count for a J-mode run; must make steps(J_max)/steps(J) an integer.
  std::function<std::size_t(std::size_t)> steps = [](std::size_t j) { return j * j; };
  /// Initial condition X₀(x).
  std::function<double(double)> initial = [](double) { return 1.0; };
  /// Evaluation grid size; 0 selects 4·J_max.
  std::size_t eval_points = 0;
};

struct RefinementRow {
  std::size_t j_coarse = 0;
  std::size_t j_fine = 0;
  double error = 0.0;
};

/// Errors between consecutive resolutions driven by one nested noise path.
std::vector<RefinementRow> refinement_study(const std::function<SemilinearProblem(std::size_t)>& make_problem,
                                            Scheme scheme, const std::vector<std::size_t>& j_list,
                                            const RefinementOptions& options);

}  // namespace kpz::spectral
