#include "kpz/fd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "kpz/errors.hpp"

namespace kpz::spectral {
namespace {

std::vector<double> fd_nodes(std::size_t m, FdBoundary bc) {
  std::vector<double> x(m);
  const double denom = bc == FdBoundary::periodic ? static_cast<double>(m) : static_cast<double>(m + 1);
  const double shift = bc == FdBoundary::periodic ? 0.0 : 1.0;
  for (std::size_t i = 0; i < m; ++i) x[i] = (static_cast<double>(i) + shift) / denom;
  return x;
}

// Thomas algorithm for constant tridiagonal (sub = sup = c, diag = d).
void thomas(std::span<double> rhs, double d, double c) {
  const std::size_t n = rhs.size();
  std::vector<double> cp(n);
  double denom = d;
  if (denom == 0.0) throw NumericError("tridiagonal solve: zero pivot");
  cp[0] = c / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = d - c * cp[i - 1];
    if (denom == 0.0) throw NumericError("tridiagonal solve: zero pivot");
    cp[i] = c / denom;
    rhs[i] = (rhs[i] - c * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cp[i] * rhs[i + 1];
}

}  // namespace

FdStepper::FdStepper(SemilinearProblem problem, std::size_t points, FdBoundary boundary)
    : problem_(std::move(problem)), boundary_(boundary),
      h_(boundary == FdBoundary::periodic ? 1.0 / static_cast<double>(points)
                                          : 1.0 / static_cast<double>(points + 1)),
      table_(TrigBasis(problem_.op.size()), fd_nodes(points, boundary), boundary == FdBoundary::periodic) {
  if (boundary == FdBoundary::periodic && points < 3) throw InvalidArgument("FdStepper: periodic grid needs 3 points");
  if (points < 1) throw InvalidArgument("FdStepper: empty grid");
  w_.resize(points);
  tmp_.resize(points);
}

void FdStepper::step(std::span<double> y, std::span<const double> dw, double dt) {
  if (y.size() != table_.points()) throw DimensionError("FdStepper::step: state has wrong size");
  if (dw.size() != problem_.op.size()) throw DimensionError("FdStepper::step: noise slice has wrong size");
  if (!(dt > 0.0)) throw InvalidArgument("FdStepper::step: dt must be positive");
  std::vector<double> rhs(y.begin(), y.end());
  if (problem_.drift) {
    problem_.drift(y, tmp_);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += dt * tmp_[i];
  }
  if (!problem_.diffusion.is_zero()) {
    table_.synthesize(dw, w_);
    problem_.diffusion.multiplier(y, tmp_);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += tmp_[i] * w_[i];
  }
  solve(rhs, dt * problem_.op.nu / (h_ * h_));
  std::copy(rhs.begin(), rhs.end(), y.begin());
}

void FdStepper::solve(std::span<double> y, double r) const {
  const double d = 1.0 + 2.0 * r, c = -r;
  if (boundary_ == FdBoundary::dirichlet) {
    thomas(y, d, c);
    return;
  }
  // Cyclic system via Sherman–Morrison: A = T + u vᵀ with u = (γ,0,..,c), v = (1,0,..,c/γ).
  const std::size_t n = y.size();
  const double gamma = -d;
  std::vector<double> z(n, 0.0);
  z[0] = gamma;
  z[n - 1] = c;
  // T has its first and last diagonal entries modified.
  auto solve_modified = [&](std::span<double> rhs) {
    std::vector<double> cp(n);
    double denom = d - gamma;
    cp[0] = c / denom;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
      const double di = (i == n - 1) ? d - c * c / gamma : d;
      denom = di - c * cp[i - 1];
      if (denom == 0.0) throw NumericError("cyclic tridiagonal solve: zero pivot");
      cp[i] = c / denom;
      rhs[i] = (rhs[i] - c * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cp[i] * rhs[i + 1];
  };
  solve_modified(y);
  solve_modified(z);
  const double vy = y[0] + c / gamma * y[n - 1];
  const double vz = z[0] + c / gamma * z[n - 1];
  const double f = vy / (1.0 + vz);
  for (std::size_t i = 0; i < n; ++i) y[i] -= f * z[i];
}

std::vector<double> step_fd_euler_maruyama(std::span<const double> y, const SemilinearProblem& problem,
                                           std::span<const double> dw, double dt, FdBoundary boundary) {
  FdStepper stepper(problem, y.size(), boundary);
  std::vector<double> out(y.begin(), y.end());
  stepper.step(out, dw, dt);
  return out;
}

}  // namespace kpz::spectral
