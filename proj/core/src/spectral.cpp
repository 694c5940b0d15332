#include "kpz/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "kpz/errors.hpp"
#include "kpz/parallel.hpp"
#include "kpz/stats.hpp"

namespace kpz::spectral {

SpectralOperator SpectralOperator::periodic(std::size_t modes, double nu) {
  if (modes == 0) throw InvalidArgument("SpectralOperator: need at least one mode");
  if (!(nu > 0.0)) throw InvalidArgument("SpectralOperator: nu must be positive");
  SpectralOperator op;
  op.nu = nu;
  op.eigenvalues.resize(modes);
  for (std::size_t j = 0; j < modes; ++j) op.eigenvalues[j] = TrigBasis::eigenvalue(j);
  return op;
}

SpectralField SpectralField::constant(std::size_t modes, double value) {
  SpectralField f{std::vector<double>(modes, 0.0)};
  f.coeffs.at(0) = value;
  return f;
}

Diffusion Diffusion::none() { return {}; }

Diffusion Diffusion::multiplicative(double lambda) {
  if (lambda == 0.0) return none();
  return pointwise([lambda](double u) { return lambda * u; }, [lambda](double) { return lambda; });
}

Diffusion Diffusion::pointwise(std::function<double(double)> g, std::function<double(double)> dg) {
  Diffusion d;
  d.kind_ = Kind::pointwise;
  d.g_ = std::move(g);
  d.dg_ = std::move(dg);
  return d;
}

Diffusion Diffusion::general(GridMap multiplier) {
  Diffusion d;
  d.kind_ = Kind::general;
  d.map_ = std::move(multiplier);
  return d;
}

void Diffusion::multiplier(std::span<const double> u, std::span<double> out) const {
  switch (kind_) {
    case Kind::zero:
      for (double& v : out) v = 0.0;
      break;
    case Kind::pointwise:
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = g_(u[i]);
      break;
    case Kind::general:
      map_(u, out);
      break;
  }
}

void Diffusion::milstein_factor(std::span<const double> u, std::span<double> out) const {
  if (kind_ == Kind::zero) {
    for (double& v : out) v = 0.0;
    return;
  }
  if (kind_ != Kind::pointwise)
    throw UnsupportedOperator("Milstein correction needs a pointwise diffusion coefficient");
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = dg_(u[i]) * g_(u[i]);
}

SemilinearProblem heat_problem(std::size_t modes, double nu, double lambda) {
  return {SpectralOperator::periodic(modes, nu), {}, Diffusion::multiplicative(lambda), {}};
}

const char* to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::euler_galerkin: return "euler-galerkin";
    case Scheme::lord_rougemont: return "lord-rougemont";
    case Scheme::milstein: return "milstein";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "euler-galerkin") return Scheme::euler_galerkin;
  if (name == "lord-rougemont") return Scheme::lord_rougemont;
  if (name == "milstein") return Scheme::milstein;
  throw InvalidArgument("unknown scheme '" + name + "'");
}

SpectralStepper::SpectralStepper(SemilinearProblem problem, std::size_t grid_points)
    : problem_(std::move(problem)),
      table_(BasisTable::uniform(TrigBasis(problem_.op.size()),
                                 grid_points ? grid_points : 2 * problem_.op.size() + 2)),
      fft_(problem_.op.size(), table_.points()) {
  if (table_.points() < 2 * modes()) throw InvalidArgument("SpectralStepper: grid needs at least 2J points");
  const auto& q = problem_.noise_weights;
  if (!q.empty() && q.size() != modes()) throw DimensionError("SpectralStepper: one noise weight per mode");
  sum_sq_.assign(table_.points(), 0.0);
  for (std::size_t i = 0; i < table_.points(); ++i)
    for (std::size_t j = 0; j < modes(); ++j) {
      const double c = table_.at(i, j) * (q.empty() ? 1.0 : q[j]);
      sum_sq_[i] += c * c;
    }
  weighted_.resize(modes());
  const std::size_t m = table_.points();
  u_.resize(m);
  w_.resize(m);
  acc_.resize(m);
  tmp_.resize(m);
  proj_.resize(modes());
}

std::span<const double> SpectralStepper::weighted(std::span<const double> dw) {
  if (problem_.noise_weights.empty()) return dw;
  for (std::size_t j = 0; j < dw.size(); ++j) weighted_[j] = dw[j] * problem_.noise_weights[j];
  return weighted_;
}

void SpectralStepper::update_factors(double dt) {
  if (dt == cached_dt_) return;
  const auto& lam = problem_.op.eigenvalues;
  implicit_.resize(lam.size());
  exponential_.resize(lam.size());
  for (std::size_t j = 0; j < lam.size(); ++j) {
    implicit_[j] = 1.0 / (1.0 + dt * problem_.op.nu * lam[j]);
    exponential_[j] = std::exp(-dt * problem_.op.nu * lam[j]);
  }
  cached_dt_ = dt;
}

void SpectralStepper::step(Scheme scheme, SpectralField& state, std::span<const double> dw, double dt) {
  if (state.size() != modes()) throw DimensionError("step: state has wrong number of modes");
  if (dw.size() != modes()) throw DimensionError("step: noise slice has wrong number of modes");
  if (!(dt > 0.0)) throw InvalidArgument("step: dt must be positive");
  update_factors(dt);
  const bool has_drift = static_cast<bool>(problem_.drift);
  const bool has_noise = !problem_.diffusion.is_zero();
  if (has_drift || has_noise) {
    fft_.synthesize(state.coeffs, u_);
    for (double& v : acc_) v = 0.0;
    if (has_drift) {
      problem_.drift(u_, tmp_);
      for (std::size_t i = 0; i < acc_.size(); ++i) acc_[i] += dt * tmp_[i];
    }
    if (has_noise) {
      fft_.synthesize(weighted(dw), w_);
      problem_.diffusion.multiplier(u_, tmp_);
      for (std::size_t i = 0; i < acc_.size(); ++i) acc_[i] += tmp_[i] * w_[i];
      if (scheme == Scheme::milstein) {
        problem_.diffusion.milstein_factor(u_, tmp_);
        for (std::size_t i = 0; i < acc_.size(); ++i)
          acc_[i] += 0.5 * tmp_[i] * (w_[i] * w_[i] - dt * sum_sq_[i]);
      }
    }
    fft_.analyze(acc_, proj_);
    for (std::size_t j = 0; j < proj_.size(); ++j) state.coeffs[j] += proj_[j];
  }
  const auto& factor = scheme == Scheme::euler_galerkin ? implicit_ : exponential_;
  for (std::size_t j = 0; j < factor.size(); ++j) state.coeffs[j] *= factor[j];
}

std::vector<double> SpectralStepper::milstein_correction(const SpectralField& state,
                                                         std::span<const double> dw, double dt) const {
  const std::size_t m = table_.points();
  std::vector<double> u(m), w(m), gg(m), out(m);
  table_.synthesize(state.coeffs, u);
  std::vector<double> scaled(dw.begin(), dw.end());
  if (!problem_.noise_weights.empty())
    for (std::size_t j = 0; j < scaled.size(); ++j) scaled[j] *= problem_.noise_weights[j];
  table_.synthesize(scaled, w);
  problem_.diffusion.milstein_factor(u, gg);
  for (std::size_t i = 0; i < m; ++i) out[i] = 0.5 * gg[i] * (w[i] * w[i] - dt * sum_sq_[i]);
  return out;
}

SpectralField SpectralStepper::project(const std::function<double(double)>& f) const {
  std::vector<double> v(table_.points());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(table_.nodes()[i]);
  return {table_.analyze(v)};
}

namespace {
SpectralField one_step(Scheme s, const SpectralField& state, const SemilinearProblem& p,
                       std::span<const double> dw, double dt) {
  SpectralStepper stepper(p);
  SpectralField out = state;
  stepper.step(s, out, dw, dt);
  return out;
}
}  // namespace

SpectralField step_euler_galerkin(const SpectralField& state, const SemilinearProblem& problem,
                                  std::span<const double> dw, double dt) {
  return one_step(Scheme::euler_galerkin, state, problem, dw, dt);
}
SpectralField step_lord_rougemont(const SpectralField& state, const SemilinearProblem& problem,
                                  std::span<const double> dw, double dt) {
  return one_step(Scheme::lord_rougemont, state, problem, dw, dt);
}
SpectralField step_milstein(const SpectralField& state, const SemilinearProblem& problem,
                            std::span<const double> dw, double dt) {
  return one_step(Scheme::milstein, state, problem, dw, dt);
}

Trajectory integrate(const SemilinearProblem& problem, Scheme scheme, const SpectralField& initial,
                     const noise::NoiseRealization& noise) {
  if (initial.size() != problem.op.size()) throw DimensionError("integrate: initial state has wrong size");
  if (noise.n_time() > 0 && noise.modes() != problem.op.size())
    throw DimensionError("integrate: noise has " + std::to_string(noise.modes()) + " modes, problem has " +
                         std::to_string(problem.op.size()));
  Trajectory tr{noise.dt, {initial}};
  if (noise.n_time() == 0) return tr;
  SpectralStepper stepper(problem);
  tr.states.reserve(noise.n_time() + 1);
  SpectralField y = initial;
  for (std::size_t n = 0; n < noise.n_time(); ++n) {
    stepper.step(scheme, y, noise.step(n), noise.dt);
    tr.states.push_back(y);
  }
  return tr;
}

SpectralField integrate_final(const SemilinearProblem& problem, Scheme scheme, const SpectralField& initial,
                              const noise::NoiseRealization& noise) {
  if (initial.size() != problem.op.size()) throw DimensionError("integrate: initial state has wrong size");
  if (noise.n_time() > 0 && noise.modes() != problem.op.size())
    throw DimensionError("integrate: noise/problem mode mismatch");
  SpectralField y = initial;
  if (noise.n_time() == 0) return y;
  SpectralStepper stepper(problem);
  for (std::size_t n = 0; n < noise.n_time(); ++n) stepper.step(scheme, y, noise.step(n), noise.dt);
  return y;
}

double mc_error_norm(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  if (a.empty()) throw InvalidArgument("mc_error_norm: no realizations");
  if (a.size() != b.size()) throw DimensionError("mc_error_norm: realization counts differ");
  std::vector<double> per(a.size());
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (a[r].size() != b[r].size() || a[r].empty()) throw DimensionError("mc_error_norm: grids differ");
    std::vector<double> sq(a[r].size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = (a[r][i] - b[r][i]) * (a[r][i] - b[r][i]);
    per[r] = stats::mean(sq);
  }
  return std::sqrt(stats::mean(per));
}

std::vector<RefinementRow> refinement_study(const std::function<SemilinearProblem(std::size_t)>& make_problem,
                                            Scheme scheme, const std::vector<std::size_t>& j_list,
                                            const RefinementOptions& opt) {
  if (j_list.size() < 2) throw InvalidArgument("refinement_study: need at least two resolutions");
  for (std::size_t k = 1; k < j_list.size(); ++k)
    if (j_list[k] <= j_list[k - 1]) throw InvalidArgument("refinement_study: J list must increase");
  if (opt.realizations == 0) throw InvalidArgument("refinement_study: need at least one realization");
  const std::size_t j_max = j_list.back();
  const std::size_t fine_steps = opt.steps(j_max);
  for (std::size_t j : j_list) {
    const std::size_t s = opt.steps(j);
    if (s == 0 || fine_steps % s != 0)
      throw InvalidArgument("refinement_study: step counts must nest (J=" + std::to_string(j) + ")");
  }
  const std::size_t eval_points = opt.eval_points ? opt.eval_points : 4 * j_max;
  const auto eval_nodes = periodic_grid(eval_points);

  // samples[level][realization] on the evaluation grid
  std::vector<std::vector<std::vector<double>>> samples(
      j_list.size(), std::vector<std::vector<double>>(opt.realizations));
  std::vector<SemilinearProblem> problems;
  std::vector<BasisTable> eval_tables;
  for (std::size_t j : j_list) {
    problems.push_back(make_problem(j));
    eval_tables.emplace_back(TrigBasis(j), eval_nodes, true);
  }

  // Every level is driven from one fine path generated row by row, so memory
  // stays O(J) even when the finest run has millions of steps.
  parallel_for(opt.realizations, opt.workers, [&](std::size_t r) {
    const noise::RngStream stream(opt.seed, r);
    const std::size_t levels = j_list.size();
    std::vector<SpectralStepper> steppers;
    std::vector<SpectralField> states;
    std::vector<std::vector<double>> pending;
    std::vector<std::size_t> block;
    std::vector<double> dts;
    for (std::size_t level = 0; level < levels; ++level) {
      steppers.emplace_back(problems[level]);
      states.push_back(steppers.back().project(opt.initial));
      pending.emplace_back(j_list[level], 0.0);
      const std::size_t steps = opt.steps(j_list[level]);
      block.push_back(fine_steps / steps);
      dts.push_back(opt.final_time / static_cast<double>(steps));
    }
    const double scale = std::sqrt(opt.final_time / static_cast<double>(fine_steps));
    std::vector<double> row(j_max);
    for (std::size_t n = 0; n < fine_steps; ++n) {
      std::fill(row.begin(), row.end(), 0.0);
      noise::accumulate_row(stream, n, scale, row);
      for (std::size_t level = 0; level < levels; ++level) {
        for (std::size_t j = 0; j < pending[level].size(); ++j) pending[level][j] += row[j];
        if ((n + 1) % block[level] == 0) {
          steppers[level].step(scheme, states[level], pending[level], dts[level]);
          std::fill(pending[level].begin(), pending[level].end(), 0.0);
        }
      }
    }
    for (std::size_t level = 0; level < levels; ++level)
      samples[level][r] = eval_tables[level].synthesize(states[level].coeffs);
  });

  std::vector<RefinementRow> rows;
  for (std::size_t level = 1; level < j_list.size(); ++level)
    rows.push_back({j_list[level - 1], j_list[level], mc_error_norm(samples[level - 1], samples[level])});
  return rows;
}

}  // namespace kpz::spectral
