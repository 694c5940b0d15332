#include "kpz/mhfe.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "kpz/errors.hpp"
#include "kpz/parallel.hpp"
#include "kpz/stats.hpp"

namespace kpz::mhfe {

Mesh1D::Mesh1D(double a_, double b_, std::size_t m_) : a(a_), b(b_), m(m_) {
  if (m < 2) throw InvalidArgument("Mesh1D: need at least two elements");
  if (!(b > a)) throw InvalidArgument("Mesh1D: need a < b");
}

std::vector<double> Mesh1D::nodes() const {
  std::vector<double> x(m + 1);
  for (std::size_t i = 0; i <= m; ++i) x[i] = node(i);
  return x;
}

std::vector<double> Mesh1D::centers() const {
  std::vector<double> x(m);
  for (std::size_t j = 0; j < m; ++j) x[j] = center(j);
  return x;
}

Forcing zero_forcing() { return constant_forcing(0.0); }

Forcing constant_forcing(double value) {
  return [value](std::size_t, double, std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), value);
  };
}

Forcing function_forcing(std::function<double(double, double)> f) {
  return [f = std::move(f)](std::size_t, double t, std::span<const double> nodes, std::span<double> out) {
    for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = f(t, nodes[i]);
  };
}

Forcing matrix_forcing(Matrix field) {
  return [field = std::move(field)](std::size_t step, double, std::span<const double>, std::span<double> out) {
    if (step >= field.rows()) throw DimensionError("matrix_forcing: not enough time rows for step " + std::to_string(step));
    const auto row = field.row(step);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = row[i % row.size()];
  };
}

Solver::Solver(Mesh1D mesh, KpzParameters params, Boundary boundary)
    : mesh_(mesh), params_(params), boundary_(std::move(boundary)) {
  params_.validate();
  if (boundary_.kind == Boundary::Kind::dirichlet && (!boundary_.left || !boundary_.right))
    throw InvalidArgument("Dirichlet boundary needs both boundary functions");
  const double dx = mesh_.dx();
  LocalSystem s = assemble_local(dx, params_, {});
  inv_interior_ = inverse(s.M);
  s.side = Side::left_boundary;
  apply_dirichlet_left(s, 0.0, dx, params_);
  inv_left_ = inverse(s.M);
  s = assemble_local(dx, params_, {}, Side::right_boundary);
  apply_dirichlet_right(s, 0.0, dx, params_);
  inv_right_ = inverse(s.M);
}

LocalSystem Solver::local_system(std::size_t j, const std::vector<ElementState>& states,
                                 std::span<const double> H_prev, std::span<const double> xi, double g_left,
                                 double g_right) const {
  const std::size_t m = mesh_.m;
  const bool periodic = boundary_.kind == Boundary::Kind::periodic;
  LocalInputs in;
  if (j > 0 || periodic) {
    const auto& L = states[j > 0 ? j - 1 : m - 1];
    in.left = {L.l2, L.U2};
  }
  if (j + 1 < m || periodic) {
    const auto& R = states[j + 1 < m ? j + 1 : 0];
    in.right = {R.l1, R.U1};
  }
  in.previous = states[j];
  in.H_prev_time = H_prev[j];
  in.xi1 = xi[j];
  in.xi2 = xi[j + 1];
  Side side = Side::interior;
  if (!periodic && j == 0) side = Side::left_boundary;
  if (!periodic && j + 1 == m) side = Side::right_boundary;
  LocalSystem s = assemble_local(mesh_.dx(), params_, in, side);
  if (side == Side::left_boundary) apply_dirichlet_left(s, g_left, mesh_.dx(), params_);
  if (side == Side::right_boundary) apply_dirichlet_right(s, g_right, mesh_.dx(), params_);
  return s;
}

ElementState Solver::solve_with(const LocalSystem& sys) const {
  const Mat5& inv = sys.side == Side::interior ? inv_interior_
                    : sys.side == Side::left_boundary ? inv_left_ : inv_right_;
  Vec5 x{};
  for (int r = 0; r < 5; ++r) {
    double acc = 0.0;
    for (int c = 0; c < 5; ++c) acc += inv[r][c] * sys.rhs[c];
    x[r] = acc;
  }
  return ElementState::from_array(x);
}

double Solver::sweep(std::vector<ElementState>& states, std::span<const double> H_prev, std::span<const double> xi,
                     double g_left, double g_right) const {
  const std::size_t m = mesh_.m;
  if (states.size() != m || H_prev.size() != m || xi.size() != m + 1)
    throw DimensionError("sweep: state, previous-time or forcing arrays have the wrong size");
  double diff2 = 0.0, norm2 = 0.0;
  auto update = [&](std::size_t j) {
    const ElementState old = states[j];
    const ElementState fresh = solve_with(local_system(j, states, H_prev, xi, g_left, g_right));
    states[j] = fresh;
    const auto a = old.to_array(), b = fresh.to_array();
    for (int k = 0; k < 5; ++k) {
      diff2 += (b[k] - a[k]) * (b[k] - a[k]);
      norm2 += b[k] * b[k];
    }
  };
  const bool periodic = boundary_.kind == Boundary::Kind::periodic;
  std::size_t first = 0, last = m;  // interior range [first, last)
  if (!periodic) {
    update(0);
    update(m - 1);
    first = 1;
    last = m - 1;
  }
  for (std::size_t parity = 0; parity < 2; ++parity)
    for (std::size_t j = first; j < last; ++j)
      if (j % 2 == parity) update(j);
  if (norm2 == 0.0) return std::sqrt(diff2);
  return std::sqrt(diff2 / norm2);
}

Solver::StepReport Solver::step(std::vector<ElementState>& states, std::span<const double> xi, double g_left,
                                double g_right) const {
  std::vector<double> H_prev(states.size());
  for (std::size_t j = 0; j < states.size(); ++j) H_prev[j] = states[j].H;
  StepReport rep;
  while (rep.iterations < params_.max_iters) {
    rep.last_error = sweep(states, H_prev, xi, g_left, g_right);
    ++rep.iterations;
    if (rep.last_error <= params_.tol) {
      rep.converged = true;
      break;
    }
  }
  return rep;
}

double red_black_sweep(const Mesh1D& mesh, const KpzParameters& params, const Boundary& boundary,
                       std::vector<ElementState>& states, std::span<const double> H_prev,
                       std::span<const double> xi, double t) {
  const Solver solver(mesh, params, boundary);
  const bool dirichlet = boundary.kind == Boundary::Kind::dirichlet;
  return solver.sweep(states, H_prev, xi, dirichlet ? boundary.left(t) : 0.0, dirichlet ? boundary.right(t) : 0.0);
}

std::vector<ElementState> initial_states(const Mesh1D& mesh, std::span<const double> h0, const KpzParameters& p,
                                         const Boundary& boundary, double t0) {
  const std::size_t m = mesh.m;
  if (h0.size() != m) throw DimensionError("initial_states: need one value per element");
  const double dx = mesh.dx();
  std::vector<double> l(m + 1), U(m + 1);
  for (std::size_t i = 1; i < m; ++i) {
    l[i] = 0.5 * (h0[i - 1] + h0[i]);
    U[i] = -p.nu * (h0[i] - h0[i - 1]) / dx;
  }
  if (boundary.kind == Boundary::Kind::periodic) {
    l[0] = l[m] = 0.5 * (h0[m - 1] + h0[0]);
    U[0] = U[m] = -p.nu * (h0[0] - h0[m - 1]) / dx;
  } else {
    l[0] = boundary.left(t0);
    l[m] = boundary.right(t0);
    U[0] = -p.nu * (h0[0] - l[0]) / (dx / 2.0);
    U[m] = -p.nu * (l[m] - h0[m - 1]) / (dx / 2.0);
  }
  std::vector<ElementState> s(m);
  for (std::size_t j = 0; j < m; ++j) s[j] = {l[j], l[j + 1], U[j], U[j + 1], h0[j]};
  return s;
}

void MarchResult::require_converged() const {
  if (!converged) throw ConvergenceError(failed_step, max_iterations, last_error);
}

MarchResult time_march(const Mesh1D& mesh, std::span<const double> h0, const Boundary& boundary,
                       const Forcing& forcing, const KpzParameters& params, const MarchOptions& options) {
  if (!(options.final_time >= 0.0)) throw InvalidArgument("time_march: final time must be non-negative");
  const double ratio = options.final_time / params.dt;
  const auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-8 * std::max(1.0, ratio))
    throw InvalidArgument("time_march: dt must divide the final time");
  const Solver solver(mesh, params, boundary);
  const bool dirichlet = boundary.kind == Boundary::Kind::dirichlet;
  MarchResult res;
  auto states = initial_states(mesh, h0, params, boundary, 0.0);
  auto record = [&](double t) {
    std::vector<double> H(states.size());
    for (std::size_t j = 0; j < states.size(); ++j) H[j] = states[j].H;
    res.times.push_back(t);
    res.H.push_back(std::move(H));
  };
  if (options.record_every) record(0.0);
  const auto nodes = mesh.nodes();
  std::vector<double> xi(mesh.m + 1);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n + 1) * params.dt;
    forcing(n, t, nodes, xi);
    const auto rep = solver.step(states, xi, dirichlet ? boundary.left(t) : 0.0, dirichlet ? boundary.right(t) : 0.0);
    res.total_iterations += rep.iterations;
    res.max_iterations = std::max(res.max_iterations, rep.iterations);
    res.last_error = rep.last_error;
    ++res.steps;
    if (!rep.converged) {
      res.converged = false;
      res.failed_step = n;
      break;
    }
    if (options.record_every && ((n + 1) % options.record_every == 0 || n + 1 == steps)) record(t);
  }
  res.final_states = std::move(states);
  if (!options.record_every) {
    std::vector<double> H(res.final_states.size());
    for (std::size_t j = 0; j < H.size(); ++j) H[j] = res.final_states[j].H;
    res.times.push_back(static_cast<double>(res.steps) * params.dt);
    res.H.push_back(std::move(H));
  }
  return res;
}

double stromatolite_exact(double t, double x, double A, double B, double x0, double v, double nu, double lambda) {
  const double s = 2.0 * lambda * t + B;
  if (!(s > 0.0)) throw DomainError("stromatolite_exact: 2λt + B must be positive");
  return A + (v + lambda) * t - (lambda / nu) * std::log(s) - (x - x0) * (x - x0) / s;
}

double stromatolite_exact(double t, double x, const StromatoliteParams& s) {
  return stromatolite_exact(t, x, s.A, s.B, s.x0, s.v, s.nu, s.lambda);
}

double stromatolite_printed_boundary(double t) {
  const double s = 2.0 * t + 1.0;
  if (!(s > 0.0)) throw DomainError("stromatolite_printed_boundary: 2t + 1 must be positive");
  return t - std::log(s) - 1.0 / s - 1.0;
}

double stromatolite_forcing(const StromatoliteParams& s) {
  if (s.lambda != s.nu)
    throw InvalidArgument("stromatolite profile is an exact solution only when lambda equals nu");
  return s.v + s.lambda;
}

const char* to_string(ErrorNorm n) noexcept {
  switch (n) {
    case ErrorNorm::max_abs: return "max";
    case ErrorNorm::l2_abs: return "l2";
    case ErrorNorm::max_relative: return "max-relative";
    case ErrorNorm::l2_relative: return "l2-relative";
  }
  return "?";
}

ErrorNorm error_norm_from_string(const std::string& name) {
  if (name == "max") return ErrorNorm::max_abs;
  if (name == "l2") return ErrorNorm::l2_abs;
  if (name == "max-relative") return ErrorNorm::max_relative;
  if (name == "l2-relative") return ErrorNorm::l2_relative;
  throw InvalidArgument("unknown error norm '" + name + "'");
}

double field_error(std::span<const double> numeric, std::span<const double> exact, double dx, ErrorNorm norm) {
  if (numeric.size() != exact.size() || numeric.empty()) throw DimensionError("field_error: size mismatch");
  double max_d = 0, max_e = 0, sum_d = 0, sum_e = 0;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    const double d = std::abs(numeric[i] - exact[i]);
    max_d = std::max(max_d, d);
    max_e = std::max(max_e, std::abs(exact[i]));
    sum_d += d * d;
    sum_e += exact[i] * exact[i];
  }
  switch (norm) {
    case ErrorNorm::max_abs: return max_d;
    case ErrorNorm::l2_abs: return std::sqrt(dx * sum_d);
    case ErrorNorm::max_relative: return max_e > 0 ? max_d / max_e : max_d;
    case ErrorNorm::l2_relative: return sum_e > 0 ? std::sqrt(sum_d / sum_e) : std::sqrt(sum_d);
  }
  return max_d;
}

StromatoliteRun run_stromatolite(std::size_t m, const ConvergenceSetup& setup) {
  Mesh1D mesh(setup.a, setup.b, m);
  const auto steps = static_cast<std::size_t>(std::ceil(setup.final_time / (setup.dt_over_dx * mesh.dx()) - 1e-9));
  KpzParameters p;
  p.nu = setup.exact.nu;
  p.lambda = setup.exact.lambda;
  p.chi1 = p.chi2 = setup.chi;
  p.dt = setup.final_time / static_cast<double>(std::max<std::size_t>(steps, 1));
  p.tol = setup.tol;
  p.max_iters = setup.max_iters;
  const auto ex = setup.exact;
  std::vector<double> h0(m);
  for (std::size_t j = 0; j < m; ++j) h0[j] = stromatolite_exact(0.0, mesh.center(j), ex);
  const auto boundary = Boundary::dirichlet([ex, a = setup.a](double t) { return stromatolite_exact(t, a, ex); },
                                            [ex, b = setup.b](double t) { return stromatolite_exact(t, b, ex); });
  MarchOptions opt;
  opt.final_time = setup.final_time;
  opt.record_every = setup.record_every;
  StromatoliteRun run{mesh, time_march(mesh, h0, boundary, constant_forcing(stromatolite_forcing(ex)), p, opt), {}};
  const double t_end = run.march.times.back();
  run.exact.resize(m);
  for (std::size_t j = 0; j < m; ++j) run.exact[j] = stromatolite_exact(t_end, mesh.center(j), ex);
  return run;
}

ConvergenceTable convergence_study(const std::vector<std::size_t>& m_list, const ConvergenceSetup& setup) {
  if (m_list.empty()) throw InvalidArgument("convergence_study: empty mesh list");
  ConvergenceTable table;
  table.rows.resize(m_list.size());
  parallel_for(m_list.size(), setup.workers, [&](std::size_t k) {
    const auto run = run_stromatolite(m_list[k], setup);
    auto& row = table.rows[k];
    row.m = m_list[k];
    row.dx = run.mesh.dx();
    row.dt = setup.final_time / static_cast<double>(std::max<std::size_t>(run.march.steps, 1));
    row.steps = run.march.steps;
    row.iterations = run.march.total_iterations;
    row.converged = run.march.converged;
    row.error = field_error(run.march.H.back(), run.exact, row.dx, setup.norm);
  });
  if (table.rows.size() >= 2) {
    std::vector<double> dx, e;
    for (const auto& r : table.rows) {
      dx.push_back(r.dx);
      e.push_back(r.error);
    }
    const auto fit = stats::loglog_fit(dx, e);
    table.order = fit.slope;
    table.order_se = fit.slope_se;
  }
  return table;
}

}  // namespace kpz::mhfe
