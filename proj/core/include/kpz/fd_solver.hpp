#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kpz/basis.hpp"
#include "kpz/spectral.hpp"

namespace kpz::spectral {

enum class FdBoundary { periodic, dirichlet };

/// Semi-implicit Euler–Maruyama on a uniform grid with the centred second
/// difference: (I + Δt ν A_h) Y_{n+1} = Y_n + F(Y_n) Δt + G(Y_n) ΔW_n.
///
/// Periodic grids use nodes x_i = i/M; Dirichlet grids use the interior nodes
/// x_i = i/(M+1), i = 1..M, with zero boundary values. The noise increment at
/// each node is Σ_j ΔW_j χ_j(x_i) over the problem's modes.
class FdStepper {
public:
  FdStepper(SemilinearProblem problem, std::size_t points, FdBoundary boundary);

  const std::vector<double>& nodes() const noexcept { return table_.nodes(); }
  double spacing() const noexcept { return h_; }

  void step(std::span<double> y, std::span<const double> dw, double dt);

private:
  void solve(std::span<double> y, double r) const;

  SemilinearProblem problem_;
  FdBoundary boundary_;
  double h_;
  BasisTable table_;
  std::vector<double> w_, tmp_;
};

std::vector<double> step_fd_euler_maruyama(std::span<const double> y, const SemilinearProblem& problem,
                                           std::span<const double> dw, double dt, FdBoundary boundary);

}  // namespace kpz::spectral
