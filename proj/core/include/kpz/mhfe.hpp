#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kpz/matrix.hpp"

namespace kpz::mhfe {

/// Uniform partition of [a, b] into m elements with nodes x_0..x_m.
struct Mesh1D {
  Mesh1D(double a, double b, std::size_t m);

  double a, b;
  std::size_t m;

  double dx() const noexcept { return (b - a) / static_cast<double>(m); }
  double node(std::size_t i) const noexcept { return a + static_cast<double>(i) * dx(); }
  double center(std::size_t j) const noexcept { return a + (static_cast<double>(j) + 0.5) * dx(); }
  std::vector<double> nodes() const;
  std::vector<double> centers() const;
};

/// Local unknowns of one element: traces l1, l2, fluxes U1, U2 (u = −ν∂ₓh) at
/// the left and right nodes, and the cell height H.
struct ElementState {
  double l1 = 0.0, l2 = 0.0, U1 = 0.0, U2 = 0.0, H = 0.0;

  std::array<double, 5> to_array() const noexcept { return {l1, l2, U1, U2, H}; }
  static ElementState from_array(const std::array<double, 5>& x) noexcept { return {x[0], x[1], x[2], x[3], x[4]}; }
  friend bool operator==(const ElementState&, const ElementState&) = default;
};

struct KpzParameters {
  double nu = 1.0;
  double lambda = 0.0;
  double chi1 = 1.0;
  double chi2 = 1.0;
  double dt = 1e-3;
  double tol = 1e-10;
  std::size_t max_iters = 100000;

  double alpha() const noexcept { return 1.0 / nu; }
  double beta() const noexcept { return -lambda / (2.0 * nu * nu); }
  /// Throws InvalidArgument for inadmissible values.
  void validate() const;
};

enum class Side { interior, left_boundary, right_boundary };

using Mat5 = std::array<std::array<double, 5>, 5>;
using Vec5 = std::array<double, 5>;

/// M·X = rhs for one element, unknowns ordered (l1, l2, U1, U2, H).
struct LocalSystem {
  Mat5 M{};
  Vec5 rhs{};
  Side side = Side::interior;
};

/// Robin data received from a neighbour: its trace and flux at the shared node.
struct NeighborData {
  double l = 0.0;
  double U = 0.0;
};

/// Element data entering the local system besides the neighbours.
struct LocalInputs {
  NeighborData left;            ///< l2, U2 of the left neighbour
  NeighborData right;           ///< l1, U1 of the right neighbour
  ElementState previous;        ///< iterate k−1 of this element (lagged U²)
  double H_prev_time = 0.0;     ///< H at the previous time level
  double xi1 = 0.0, xi2 = 0.0;  ///< forcing at the left and right nodes
};

/// Fixed-point local system with Robin transmission on both sides.
LocalSystem assemble_local(double dx, const KpzParameters& p, const LocalInputs& in, Side side = Side::interior);
/// Replace the left Robin rows by l1 = g and αΔx/2·U1 + H = g.
void apply_dirichlet_left(LocalSystem& sys, double g, double dx, const KpzParameters& p);
/// Replace the right Robin rows by l2 = g and αΔx/2·U2 − H = −g.
void apply_dirichlet_right(LocalSystem& sys, double g, double dx, const KpzParameters& p);

/// Dense solve with partial pivoting.
ElementState solve_local(const LocalSystem& sys);
/// 1-norm condition number of M.
double condition_number(const Mat5& M);
/// Inverse of M; throws NumericError if singular.
Mat5 inverse(const Mat5& M);

/// Boundary specification for the global problem.
struct Boundary {
  enum class Kind { dirichlet, periodic };
  Kind kind = Kind::periodic;
  std::function<double(double)> left;   ///< h(t, a)
  std::function<double(double)> right;  ///< h(t, b)

  static Boundary periodic() { return {}; }
  static Boundary dirichlet(std::function<double(double)> g_left, std::function<double(double)> g_right) {
    return {Kind::dirichlet, std::move(g_left), std::move(g_right)};
  }
};

/// Fills out[i] (i = 0..m) with the forcing at node x_i for the step from
/// time level `step` to `step + 1`; t is the new time level.
using Forcing = std::function<void(std::size_t step, double t, std::span<const double> nodes, std::span<double> out)>;

Forcing zero_forcing();
Forcing constant_forcing(double value);
/// f(t, x) evaluated at the new time level.
Forcing function_forcing(std::function<double(double, double)> f);
/// Row `step` of a precomputed nodal field; node i reads column i mod cols.
Forcing matrix_forcing(Matrix field);

/// Global solver for one mesh, parameter set and boundary kind. Local
/// matrices are factorised once; they do not change between elements.
class Solver {
public:
  Solver(Mesh1D mesh, KpzParameters params, Boundary boundary);

  const Mesh1D& mesh() const noexcept { return mesh_; }
  const KpzParameters& params() const noexcept { return params_; }

  /// Local system of element j from the current global iterate.
  LocalSystem local_system(std::size_t j, const std::vector<ElementState>& states,
                           std::span<const double> H_prev, std::span<const double> xi, double g_left,
                           double g_right) const;

  /// One Red-Black pass, in place. Returns ‖Xᵏ − Xᵏ⁻¹‖/‖Xᵏ‖, or the absolute
  /// change when ‖Xᵏ‖ = 0.
  double sweep(std::vector<ElementState>& states, std::span<const double> H_prev, std::span<const double> xi,
               double g_left, double g_right) const;

  struct StepReport {
    std::size_t iterations = 0;
    double last_error = 0.0;
    bool converged = false;
  };
  /// Iterate sweeps until the relative change is below tol or max_iters is hit.
  StepReport step(std::vector<ElementState>& states, std::span<const double> xi, double g_left,
                  double g_right) const;

private:
  ElementState solve_with(const LocalSystem& sys) const;

  Mesh1D mesh_;
  KpzParameters params_;
  Boundary boundary_;
  Mat5 inv_interior_{}, inv_left_{}, inv_right_{};
};

/// Free-function form of Solver::sweep.
double red_black_sweep(const Mesh1D& mesh, const KpzParameters& params, const Boundary& boundary,
                       std::vector<ElementState>& states, std::span<const double> H_prev,
                       std::span<const double> xi, double t);

/// Initial iterate from cell values: traces averaged from neighbouring cells,
/// fluxes from centred differences, boundary traces from the boundary data.
std::vector<ElementState> initial_states(const Mesh1D& mesh, std::span<const double> h0, const KpzParameters& p,
                                         const Boundary& boundary, double t0 = 0.0);

struct MarchOptions {
  double final_time = 1.0;
  /// Record H every `record_every` steps (0: final state only).
  std::size_t record_every = 0;
};

struct MarchResult {
  std::vector<double> times;
  std::vector<std::vector<double>> H;  ///< recorded cell values, H[k] at times[k]
  std::vector<ElementState> final_states;
  std::size_t steps = 0;
  std::size_t total_iterations = 0;
  std::size_t max_iterations = 0;
  bool converged = true;
  std::size_t failed_step = 0;
  double last_error = 0.0;

  /// Throws ConvergenceError when a step failed.
  void require_converged() const;
};

/// Time marching with warm-started fixed-point iterations. Stops at the first
/// step that does not converge and reports it in the result.
MarchResult time_march(const Mesh1D& mesh, std::span<const double> h0, const Boundary& boundary,
                       const Forcing& forcing, const KpzParameters& params, const MarchOptions& options);

/// Parameters of the parabolic exact solution
/// h = A + (v+λ)t − (λ/ν) log(2λt + B) − (x − x0)²/(2λt + B).
struct StromatoliteParams {
  double A = -1.0, B = 1.0, x0 = 0.0, v = 1.0, nu = 1.0, lambda = 1.0;
};

double stromatolite_exact(double t, double x, double A, double B, double x0, double v, double nu, double lambda);
double stromatolite_exact(double t, double x, const StromatoliteParams& s);
/// Boundary expression t − log(2t+1) − 1/(2t+1) − 1 as printed for the benchmark.
double stromatolite_printed_boundary(double t);

/// The exact solution solves ∂ₜh = ν∂²ₓh + (λ/2)(∂ₓh)² + (v+λ) when λ = ν.
/// Returns v + λ; throws InvalidArgument when λ ≠ ν.
double stromatolite_forcing(const StromatoliteParams& s);

enum class ErrorNorm { max_abs, l2_abs, max_relative, l2_relative };
const char* to_string(ErrorNorm n) noexcept;
ErrorNorm error_norm_from_string(const std::string& name);

/// Discrete distance between cell values and exact values at the cell centres.
double field_error(std::span<const double> numeric, std::span<const double> exact, double dx, ErrorNorm norm);

struct ConvergenceSetup {
  StromatoliteParams exact;
  double a = -1.0, b = 1.0;
  double chi = 0.1;
  double final_time = 1.0;
  double dt_over_dx = 1.0 / 16.0;  ///< Δt = dt_over_dx · Δx, rounded so Δt divides T
  double tol = 1e-10;
  std::size_t max_iters = 100000;
  ErrorNorm norm = ErrorNorm::max_abs;
  unsigned workers = 1;
  std::size_t record_every = 0;  ///< passed to MarchOptions by run_stromatolite
};

struct ConvergenceRow {
  std::size_t m = 0;
  double dx = 0.0;
  double dt = 0.0;
  double error = 0.0;
  std::size_t steps = 0;
  std::size_t iterations = 0;
  bool converged = true;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double order = 0.0;     ///< slope of log E against log Δx
  double order_se = 0.0;
};

/// Stromatolite benchmark with exact Dirichlet data and exact initial data.
ConvergenceTable convergence_study(const std::vector<std::size_t>& m_list, const ConvergenceSetup& setup);

/// Run the benchmark on one mesh and return the final cell values and exact values.
struct StromatoliteRun {
  Mesh1D mesh;
  MarchResult march;
  std::vector<double> exact;
};
StromatoliteRun run_stromatolite(std::size_t m, const ConvergenceSetup& setup);

}  // namespace kpz::mhfe
