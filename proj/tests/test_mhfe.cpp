#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "kpz/errors.hpp"
#include "kpz/mhfe.hpp"
#include "kpz/rng.hpp"

using namespace kpz;
using namespace kpz::mhfe;

namespace {

// Gaussian elimination with partial pivoting, kept separate from the library's Eigen solve.
std::array<double, 5> hand_solve(Mat5 M, Vec5 b) {
  for (int c = 0; c < 5; ++c) {
    int p = c;
    for (int r = c + 1; r < 5; ++r)
      if (std::abs(M[r][c]) > std::abs(M[p][c])) p = r;
    std::swap(M[c], M[p]);
    std::swap(b[c], b[p]);
    for (int r = c + 1; r < 5; ++r) {
      const double f = M[r][c] / M[c][c];
      for (int k = c; k < 5; ++k) M[r][k] -= f * M[c][k];
      b[r] -= f * b[c];
    }
  }
  std::array<double, 5> x{};
  for (int r = 4; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < 5; ++k) s -= M[r][k] * x[k];
    x[r] = s / M[r][r];
  }
  return x;
}

KpzParameters unit_params() {
  KpzParameters p;
  p.nu = 1.0;
  p.lambda = 0.0;
  p.chi1 = p.chi2 = 1.0;
  p.dt = 1.0;
  return p;
}

}  // namespace

TEST_CASE("mesh and parameters") {
  const Mesh1D mesh(-1.0, 1.0, 8);
  CHECK(mesh.dx() == 0.25);
  const auto nodes = mesh.nodes();
  REQUIRE(nodes.size() == 9);
  for (std::size_t i = 1; i < nodes.size(); ++i) CHECK(nodes[i] - nodes[i - 1] == doctest::Approx(0.25));
  CHECK(mesh.center(0) == doctest::Approx(-0.875));
  CHECK_THROWS(Mesh1D(0.0, 1.0, 1));

  KpzParameters p;
  p.nu = 0.4;
  p.lambda = 3.0;
  CHECK(p.alpha() * p.nu == doctest::Approx(1.0));
  CHECK(p.beta() == doctest::Approx(-3.0 / (2.0 * 0.16)));
  CHECK(p.beta() == doctest::Approx(-p.alpha() * p.alpha() * p.lambda / 2.0));
  p.chi1 = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("local system") {
  SUBCASE("matrix coefficients for unit parameters") {
    const auto s = assemble_local(1.0, unit_params(), {});
    const Mat5 expected{{{1, 0, 1, 0, 0}, {0, 1, 0, -1, 0}, {0, 0, 1.5, 0, 1}, {0, 0, 0, 1.5, -1}, {0, 0, -1, 1, 1}}};
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 5; ++c) CHECK(s.M[r][c] == expected[r][c]);
  }
  SUBCASE("constant neighbours and history give the constant state") {
    LocalInputs in;
    in.left = {2.5, 0.0};
    in.right = {2.5, 0.0};
    in.H_prev_time = 2.5;
    in.previous = {2.5, 2.5, 0.0, 0.0, 2.5};
    KpzParameters p = unit_params();
    p.dt = 0.1;
    p.chi1 = 0.3;
    p.chi2 = 0.7;
    const auto x = solve_local(assemble_local(0.2, p, in));
    CHECK(x.l1 == doctest::Approx(2.5));
    CHECK(x.l2 == doctest::Approx(2.5));
    CHECK(x.H == doctest::Approx(2.5));
    CHECK(x.U1 == doctest::Approx(0.0).scale(1.0));
    CHECK(x.U2 == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("trapezoid forcing enters the fifth row") {
    LocalInputs in;
    in.xi1 = in.xi2 = 2.0;
    const auto s = assemble_local(1.0, unit_params(), in);
    CHECK(s.rhs[4] == doctest::Approx(2.0));
  }
  SUBCASE("trapezoid rule is exact for affine forcing") {
    // ∫ over one cell of a + b·x equals Δx/2 (ξ_left + ξ_right).
    const double a = 0.7, b = -1.9, x0 = 0.3, dx = 0.05;
    LocalInputs in;
    in.xi1 = a + b * x0;
    in.xi2 = a + b * (x0 + dx);
    const double exact = a * dx + b * ((x0 + dx) * (x0 + dx) - x0 * x0) / 2.0;
    CHECK(assemble_local(dx, unit_params(), in).rhs[4] == doctest::Approx(exact).epsilon(1e-14));
  }
  SUBCASE("lagged nonlinearity") {
    KpzParameters p = unit_params();
    p.lambda = 2.0;
    LocalInputs in;
    in.previous.U1 = 1.0;
    in.previous.U2 = 2.0;
    const auto s = assemble_local(0.5, p, in);
    CHECK(s.rhs[4] == doctest::Approx(-p.beta() * 0.25 * 5.0));
  }
  SUBCASE("library solve matches elimination by hand") {
    noise::RngStream r(5, 0);
    LocalInputs in;
    in.left = {r.gaussian(), r.gaussian()};
    in.right = {r.gaussian(), r.gaussian()};
    in.previous = {r.gaussian(), r.gaussian(), r.gaussian(), r.gaussian(), r.gaussian()};
    in.H_prev_time = r.gaussian();
    in.xi1 = r.gaussian();
    in.xi2 = r.gaussian();
    KpzParameters p = unit_params();
    p.lambda = 0.8;
    p.dt = 1e-3;
    const auto s = assemble_local(0.1, p, in);
    const auto x = solve_local(s).to_array();
    const auto y = hand_solve(s.M, s.rhs);
    for (int k = 0; k < 5; ++k) CHECK(x[k] == doctest::Approx(y[k]).epsilon(1e-12));
  }
}

TEST_CASE("local matrix is invertible for random admissible parameters") {
  noise::RngStream r(99, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    KpzParameters p;
    p.nu = std::exp(4.0 * r.uniform() - 2.0);
    p.lambda = 4.0 * r.gaussian();
    p.chi1 = std::exp(6.0 * r.uniform() - 3.0);
    p.chi2 = std::exp(6.0 * r.uniform() - 3.0);
    p.dt = std::exp(10.0 * r.uniform() - 10.0);
    const double dx = std::exp(6.0 * r.uniform() - 7.0);
    auto s = assemble_local(dx, p, {});
    const double cond = condition_number(s.M);
    CHECK(std::isfinite(cond));
    CHECK(cond < 1e14);
    const auto inv = inverse(s.M);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        double acc = 0.0;
        for (int k = 0; k < 5; ++k) acc += s.M[i][k] * inv[k][j];
        CHECK(acc == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-8 * cond));
      }
  }
}

TEST_CASE("dirichlet rows") {
  KpzParameters p = unit_params();
  SUBCASE("left boundary value zero") {
    auto s = assemble_local(0.5, p, {}, Side::left_boundary);
    apply_dirichlet_left(s, 0.0, 0.5, p);
    CHECK(solve_local(s).l1 == doctest::Approx(0.0).scale(1.0));
    CHECK(s.M[2][2] == doctest::Approx(0.25));
    CHECK(s.M[2][4] == 1.0);
  }
  SUBCASE("right rows") {
    auto s = assemble_local(0.5, p, {}, Side::right_boundary);
    apply_dirichlet_right(s, 3.0, 0.5, p);
    CHECK(s.rhs[1] == 3.0);
    CHECK(s.rhs[3] == -3.0);
    CHECK(s.M[3][4] == -1.0);
    CHECK(solve_local(s).l2 == doctest::Approx(3.0));
  }
  SUBCASE("interior elements are rejected") {
    auto s = assemble_local(0.5, p, {});
    CHECK_THROWS_AS(apply_dirichlet_left(s, 0.0, 0.5, p), LogicError);
    CHECK_THROWS_AS(apply_dirichlet_right(s, 0.0, 0.5, p), LogicError);
  }
  SUBCASE("constant boundary and constant data stay constant") {
    const Mesh1D mesh(0.0, 1.0, 10);
    const std::vector<double> h0(10, 1.5);
    KpzParameters q = unit_params();
    q.dt = 0.01;
    MarchOptions opt;
    opt.final_time = 0.1;
    const auto r = time_march(mesh, h0, Boundary::dirichlet([](double) { return 1.5; }, [](double) { return 1.5; }),
                              zero_forcing(), q, opt);
    CHECK(r.converged);
    for (double v : r.H.back()) CHECK(v == doctest::Approx(1.5).epsilon(1e-9));
  }
}

TEST_CASE("stromatolite boundary and exact solution") {
  CHECK(stromatolite_printed_boundary(1.0) == doctest::Approx(1.0 - std::log(3.0) - 1.0 / 3.0 - 1.0));
  CHECK(stromatolite_printed_boundary(1.0) == doctest::Approx(-1.4319).epsilon(1e-4));
  const StromatoliteParams s;
  CHECK(stromatolite_exact(0.0, 0.0, s) == doctest::Approx(-1.0));
  CHECK(stromatolite_exact(1.0, 0.0, s) == doctest::Approx(1.0 - std::log(3.0)));
  CHECK(stromatolite_exact(1.0, 0.0, s) == doctest::Approx(-0.0986).epsilon(1e-3));
  CHECK(stromatolite_exact(0.0, 1.0, s) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(stromatolite_exact(-1.0, 0.0, -1, 1, 0, 1, 1, 1), DomainError);
  CHECK(stromatolite_forcing(s) == 2.0);
  StromatoliteParams bad = s;
  bad.lambda = 2.0;
  CHECK_THROWS_AS(stromatolite_forcing(bad), InvalidArgument);

  // The exact solution satisfies the PDE with the constant forcing when λ = ν.
  const double t = 0.4, x = 0.3, h = 1e-4;
  auto f = [&](double tt, double xx) { return stromatolite_exact(tt, xx, s); };
  const double ht = (f(t + h, x) - f(t - h, x)) / (2 * h);
  const double hx = (f(t, x + h) - f(t, x - h)) / (2 * h);
  const double hxx = (f(t, x + h) - 2 * f(t, x) + f(t, x - h)) / (h * h);
  CHECK(ht == doctest::Approx(s.nu * hxx + 0.5 * s.lambda * hx * hx + stromatolite_forcing(s)).epsilon(1e-5));
}

TEST_CASE("red-black sweep") {
  const Mesh1D mesh(0.0, 1.0, 4);
  KpzParameters p = unit_params();
  p.dt = 0.01;
  SUBCASE("a converged constant state is a fixed point") {
    const std::vector<double> h0(4, 0.8);
    auto states = initial_states(mesh, h0, p, Boundary::periodic());
    const auto before = states;
    const std::vector<double> xi(5, 0.0);
    const double err = red_black_sweep(mesh, p, Boundary::periodic(), states, h0, xi, 0.01);
    CHECK(err == doctest::Approx(0.0).scale(1.0));
    for (std::size_t j = 0; j < 4; ++j) {
      const auto a = before[j].to_array(), b = states[j].to_array();
      for (int k = 0; k < 5; ++k) CHECK(b[k] == doctest::Approx(a[k]).scale(1.0).epsilon(1e-13));
    }
  }
  SUBCASE("two elements: even then odd by hand") {
    const Mesh1D two(0.0, 1.0, 2);
    const std::vector<double> h0{0.2, 1.0};
    auto states = initial_states(two, h0, p, Boundary::periodic());
    const std::vector<double> xi{0.5, -0.3, 0.5};
    // Element 0 sees element 1 on both sides; element 1 then sees the fresh element 0.
    LocalInputs in0;
    in0.left = {states[1].l2, states[1].U2};
    in0.right = {states[1].l1, states[1].U1};
    in0.previous = states[0];
    in0.H_prev_time = h0[0];
    in0.xi1 = xi[0];
    in0.xi2 = xi[1];
    const auto s0 = assemble_local(two.dx(), p, in0);
    const auto x0 = hand_solve(s0.M, s0.rhs);
    const auto e0 = ElementState::from_array(x0);
    LocalInputs in1;
    in1.left = {e0.l2, e0.U2};
    in1.right = {e0.l1, e0.U1};
    in1.previous = states[1];
    in1.H_prev_time = h0[1];
    in1.xi1 = xi[1];
    in1.xi2 = xi[2];
    const auto s1 = assemble_local(two.dx(), p, in1);
    const auto x1 = hand_solve(s1.M, s1.rhs);
    red_black_sweep(two, p, Boundary::periodic(), states, h0, xi, 0.01);
    const auto a = states[0].to_array(), b = states[1].to_array();
    for (int k = 0; k < 5; ++k) {
      CHECK(a[k] == doctest::Approx(x0[k]).epsilon(1e-12));
      CHECK(b[k] == doctest::Approx(x1[k]).epsilon(1e-12));
    }
  }
  SUBCASE("deterministic") {
    const std::vector<double> h0{0.1, 0.4, -0.2, 0.3};
    const std::vector<double> xi{1, 2, 3, 4, 5};
    auto a = initial_states(mesh, h0, p, Boundary::periodic());
    auto b = a;
    red_black_sweep(mesh, p, Boundary::periodic(), a, h0, xi, 0.01);
    red_black_sweep(mesh, p, Boundary::periodic(), b, h0, xi, 0.01);
    CHECK(a == b);
  }
}

TEST_CASE("periodic heat march conserves mass") {
  const std::size_t m = 32;
  const Mesh1D mesh(0.0, 1.0, m);
  std::vector<double> h0(m);
  for (std::size_t j = 0; j < m; ++j) h0[j] = std::sin(2 * std::numbers::pi * mesh.center(j)) + 0.3 * std::cos(6 * std::numbers::pi * mesh.center(j)) + 1.0;
  KpzParameters p;
  p.nu = 1.0;
  p.lambda = 0.0;
  p.chi1 = p.chi2 = mesh.dx();
  p.dt = 1e-3;
  p.tol = 1e-12;
  MarchOptions opt;
  opt.final_time = 0.05;
  opt.record_every = 10;
  const auto r = time_march(mesh, h0, Boundary::periodic(), zero_forcing(), p, opt);
  REQUIRE(r.converged);
  double m0 = 0.0, norm = 0.0;
  for (double v : h0) {
    m0 += v * mesh.dx();
    norm = std::max(norm, std::abs(v));
  }
  for (const auto& H : r.H) {
    double mass = 0.0;
    for (double v : H) mass += v * mesh.dx();
    CHECK(std::abs(mass - m0) <= double(r.steps) * p.tol * norm * 10.0);
  }
  // Diffusion lowers the amplitude.
  double amp = 0.0;
  for (double v : r.H.back()) amp = std::max(amp, std::abs(v - 1.0));
  CHECK(amp < 1.0);
}

TEST_CASE("robin data agree across interfaces at convergence") {
  const std::size_t m = 16;
  const Mesh1D mesh(0.0, 1.0, m);
  std::vector<double> h0(m);
  for (std::size_t j = 0; j < m; ++j) h0[j] = std::cos(2 * std::numbers::pi * mesh.center(j));
  KpzParameters p;
  p.nu = 1.0;
  p.lambda = 1.0;
  p.chi1 = p.chi2 = 0.1;
  p.dt = 1e-3;
  p.tol = 1e-13;
  MarchOptions opt;
  opt.final_time = 0.01;
  const auto r = time_march(mesh, h0, Boundary::periodic(), constant_forcing(0.5), p, opt);
  REQUIRE(r.converged);
  const auto& s = r.final_states;
  double scale = 0.0;
  for (const auto& e : s) scale = std::max({scale, std::abs(e.l1), std::abs(e.U1), std::abs(e.H)});
  for (std::size_t j = 0; j < m; ++j) {
    const auto& right = s[(j + 1) % m];
    CHECK(std::abs(s[j].l2 - right.l1) <= 1e3 * p.tol * scale);
    CHECK(std::abs(s[j].U2 - right.U1) <= 1e3 * p.tol * scale);
  }
}

TEST_CASE("march reports non-convergence") {
  const Mesh1D mesh(0.0, 1.0, 8);
  const std::vector<double> h0{0, 1, 0, 1, 0, 1, 0, 1};
  KpzParameters p;
  p.dt = 0.01;
  p.max_iters = 2;
  p.tol = 1e-14;
  MarchOptions opt;
  opt.final_time = 0.02;
  const auto r = time_march(mesh, h0, Boundary::periodic(), zero_forcing(), p, opt);
  CHECK(!r.converged);
  CHECK(r.failed_step == 0);
  CHECK_THROWS_AS(r.require_converged(), ConvergenceError);
  p.dt = 0.03;
  CHECK_THROWS_AS(time_march(mesh, h0, Boundary::periodic(), zero_forcing(), p, opt), InvalidArgument);
}

TEST_CASE("stromatolite run tracks the exact solution") {
  ConvergenceSetup setup;
  setup.final_time = 0.1;
  const auto run = run_stromatolite(32, setup);
  CHECK(run.march.converged);
  const double e = field_error(run.march.H.back(), run.exact, run.mesh.dx(), ErrorNorm::max_abs);
  CHECK(e < 2e-3);
}

TEST_CASE("field error norms") {
  const std::vector<double> a{1.0, 2.0, 4.0}, b{1.0, 1.0, 2.0};
  CHECK(field_error(a, b, 0.5, ErrorNorm::max_abs) == 2.0);
  CHECK(field_error(a, b, 0.5, ErrorNorm::l2_abs) == doctest::Approx(std::sqrt(0.5 * 5.0)));
  CHECK(field_error(a, b, 0.5, ErrorNorm::max_relative) == doctest::Approx(1.0));
  CHECK(error_norm_from_string(to_string(ErrorNorm::l2_relative)) == ErrorNorm::l2_relative);
}
