#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "kpz/errors.hpp"
#include "kpz/mhfe.hpp"

namespace kpz::mhfe {
namespace {

using EMat5 = Eigen::Matrix<double, 5, 5, Eigen::RowMajor>;

EMat5 to_eigen(const Mat5& M) {
  EMat5 e;
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) e(r, c) = M[r][c];
  return e;
}

}  // namespace

void KpzParameters::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidArgument("nu must be positive");
  if (!std::isfinite(lambda)) throw InvalidArgument("lambda must be finite");
  if (!(chi1 > 0.0) || !(chi2 > 0.0)) throw InvalidArgument("Robin coefficients chi1, chi2 must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (max_iters == 0) throw InvalidArgument("max_iters must be positive");
}

LocalSystem assemble_local(double dx, const KpzParameters& p, const LocalInputs& in, Side side) {
  const double a = p.alpha() * dx / 2.0;
  const double r = dx / p.dt;
  const double robin_left = in.left.l + p.chi1 * in.left.U;
  LocalSystem s;
  s.side = side;
  s.M = {{{1, 0, p.chi1, 0, 0},
          {0, 1, 0, -p.chi2, 0},
          {0, 0, a + p.chi1, 0, 1},
          {0, 0, 0, a + p.chi2, -1},
          {0, 0, -1, 1, r}}};
  const double U1 = in.previous.U1, U2 = in.previous.U2;
  s.rhs = {robin_left,
           in.right.l - p.chi2 * in.right.U,
           robin_left,
           -in.right.l + p.chi2 * in.right.U,
           dx / 2.0 * (in.xi1 + in.xi2) - p.beta() * dx / 2.0 * (U1 * U1 + U2 * U2) + r * in.H_prev_time};
  return s;
}

void apply_dirichlet_left(LocalSystem& sys, double g, double dx, const KpzParameters& p) {
  if (sys.side != Side::left_boundary) throw LogicError("apply_dirichlet_left: element is not the leftmost");
  sys.M[0] = {1, 0, 0, 0, 0};
  sys.rhs[0] = g;
  sys.M[2] = {0, 0, p.alpha() * dx / 2.0, 0, 1};
  sys.rhs[2] = g;
}

void apply_dirichlet_right(LocalSystem& sys, double g, double dx, const KpzParameters& p) {
  if (sys.side != Side::right_boundary) throw LogicError("apply_dirichlet_right: element is not the rightmost");
  sys.M[1] = {0, 1, 0, 0, 0};
  sys.rhs[1] = g;
  sys.M[3] = {0, 0, 0, p.alpha() * dx / 2.0, -1};
  sys.rhs[3] = -g;
}

ElementState solve_local(const LocalSystem& sys) {
  const EMat5 M = to_eigen(sys.M);
  Eigen::PartialPivLU<EMat5> lu(M);
  if (!(std::abs(lu.determinant()) > 0.0)) throw NumericError("solve_local: singular local matrix");
  const Eigen::Matrix<double, 5, 1> b(sys.rhs.data());
  const Eigen::Matrix<double, 5, 1> x = lu.solve(b);
  return ElementState::from_array({x[0], x[1], x[2], x[3], x[4]});
}

double condition_number(const Mat5& M) {
  const EMat5 e = to_eigen(M);
  Eigen::PartialPivLU<EMat5> lu(e);
  if (!(std::abs(lu.determinant()) > 0.0)) return std::numeric_limits<double>::infinity();
  const EMat5 inv = lu.inverse();
  return e.cwiseAbs().colwise().sum().maxCoeff() * inv.cwiseAbs().colwise().sum().maxCoeff();
}

Mat5 inverse(const Mat5& M) {
  const EMat5 e = to_eigen(M);
  Eigen::PartialPivLU<EMat5> lu(e);
  if (!(std::abs(lu.determinant()) > 0.0)) throw NumericError("local matrix is singular");
  const EMat5 inv = lu.inverse();
  Mat5 out;
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) out[r][c] = inv(r, c);
  return out;
}

}  // namespace kpz::mhfe
