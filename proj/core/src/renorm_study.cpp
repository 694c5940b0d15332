#include "kpz/renorm_study.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kpz/basis.hpp"
#include "kpz/errors.hpp"
#include "kpz/mhfe.hpp"
#include "kpz/parallel.hpp"
#include "kpz/spectral.hpp"
#include "kpz/stats.hpp"

namespace kpz::renorm {
namespace {

std::size_t exact_steps(double T, double dt, const char* what) {
  const double r = T / dt;
  const auto n = static_cast<std::size_t>(std::llround(r));
  if (n == 0 || std::abs(r - static_cast<double>(n)) > 1e-9 * r)
    throw ConfigError("final_time", std::string(what) + " time step does not divide the final time");
  return n;
}

std::size_t mhfe_step_count(double T, std::size_t n) {
  const double dx = 1.0 / static_cast<double>(n);
  return exact_steps(T, dx * dx * dx, "MHFE");
}

std::size_t heat_step_count(const PipelineConfig& cfg, std::size_t n) {
  return std::max(cfg.heat_min_steps, mhfe_step_count(cfg.final_time, n));
}

struct RunOutput {
  std::vector<std::vector<double>> plain;  // per sample time
  std::vector<double> renorm_final;
  std::vector<std::vector<double>> hc;     // per sample time
  std::size_t max_iterations = 0;
};

}  // namespace

std::vector<Level> ladder_levels(std::size_t n0, const std::vector<double>& kappas) {
  std::vector<Level> out;
  for (double k : kappas) {
    if (!(k > 0.0)) throw ConfigError("kappa", "must be positive");
    out.push_back({static_cast<std::size_t>(std::llround(static_cast<double>(n0) / k)), k});
  }
  return out;
}

LevelProfiles ComparisonReport::renormalized_profiles(std::size_t level) const {
  const auto& L = levels.at(level);
  return {L.level.n, L.level.kappa, noise_key, L.renormalized};
}

ComparisonReport run_comparison(const std::vector<Level>& levels, noise::MollifierKind kind,
                                const PipelineConfig& cfg) {
  if (levels.empty()) throw ConfigError("levels", "empty ladder");
  if (!(cfg.nu > 0.0)) throw ConfigError("nu", "must be positive");
  if (cfg.lambda == 0.0) throw ConfigError("lambda", "must be nonzero for the Hopf-Cole transform");
  if (cfg.realizations == 0) throw ConfigError("realizations", "must be at least 1");
  if (cfg.samples == 0) throw ConfigError("samples", "must be at least 1");
  if (cfg.chi < 0.0) throw ConfigError("chi", "must be positive, or 0 for the mesh default");
  const double T = cfg.final_time;
  std::size_t n_max = 0;
  for (const auto& L : levels) {
    if (L.n < 2) throw ConfigError("n", "each level needs at least two cells");
    n_max = std::max(n_max, L.n);
  }
  // The shared path is fine enough to nest every solver's step on every level.
  std::size_t fine_steps = 1;
  for (const auto& L : levels)
    fine_steps = std::lcm(fine_steps, std::lcm(mhfe_step_count(T, L.n), heat_step_count(cfg, L.n)));

  ComparisonReport report;
  report.kind = kind;
  report.final_time = T;
  report.noise_key = (cfg.seed * 0x9e3779b97f4a7c15ULL) ^ (static_cast<std::uint64_t>(n_max) << 32) ^ fine_steps;

  for (const auto& L : levels) {
    const std::size_t n = L.n;
    if (n_max % n != 0) throw ConfigError("n", "level sizes must divide the finest size");
    const noise::Mollifier phi(kind, L.kappa);
    LevelResult res;
    res.level = L;
    res.constants = renorm_constants(phi);
    res.mhfe_steps = mhfe_step_count(T, n);
    res.heat_steps = heat_step_count(cfg, n);
    if (res.mhfe_steps % cfg.samples || res.heat_steps % cfg.samples)
      throw ConfigError("samples", "sample count must divide the step counts of level n=" + std::to_string(n));

    std::vector<double> times(cfg.samples);
    for (std::size_t k = 0; k < cfg.samples; ++k) times[k] = T * static_cast<double>(k + 1) / static_cast<double>(cfg.samples);

    mhfe::KpzParameters p;
    p.nu = cfg.nu;
    p.lambda = cfg.lambda;
    p.chi1 = p.chi2 = cfg.chi > 0.0 ? cfg.chi : 1.0 / static_cast<double>(n);
    p.dt = T / static_cast<double>(res.mhfe_steps);
    p.tol = cfg.tol;
    p.max_iters = cfg.max_iters;
    const mhfe::Mesh1D mesh(0.0, 1.0, n);
    const auto centers = mesh.centers();
    const BasisTable eval(TrigBasis(n), centers, false);
    auto heat = spectral::heat_problem(n, cfg.nu, cfg.lambda / (2.0 * cfg.nu));
    heat.noise_weights.resize(n);
    for (std::size_t j = 0; j < n; ++j) heat.noise_weights[j] = phi(TrigBasis::wavenumber(j));
    const double hc_scale = 2.0 * cfg.nu / cfg.lambda;

    std::vector<RunOutput> out(cfg.realizations);
    parallel_for(cfg.realizations, cfg.workers, [&](std::size_t r) {
      const noise::RngStream stream(cfg.seed, r);
      RunOutput& o = out[r];
      // KPZ with and without the constant, driven by the same nodal noise.
      const auto raw = noise::draw_nested(stream, res.mhfe_steps, n, p.dt, fine_steps / res.mhfe_steps);
      mhfe::MarchOptions opt;
      opt.final_time = T;
      opt.record_every = res.mhfe_steps / cfg.samples;
      const std::vector<double> h0(n, 0.0);
      for (const double scale : {0.0, 0.5 * cfg.lambda}) {
        auto forcing = mhfe::matrix_forcing(renormalized_forcing(raw, phi, res.constants, n, scale));
        const auto m = mhfe::time_march(mesh, h0, mhfe::Boundary::periodic(), forcing, p, opt);
        m.require_converged();
        o.max_iterations = std::max(o.max_iterations, m.max_iterations);
        if (scale == 0.0) o.plain.assign(m.H.begin() + 1, m.H.end());
        else o.renorm_final = m.H.back();
      }
      // Hopf-Cole of the multiplicative heat equation on the same noise.
      const double heat_dt = T / static_cast<double>(res.heat_steps);
      const auto heat_noise = noise::draw_nested(stream, res.heat_steps, n, heat_dt, fine_steps / res.heat_steps);
      spectral::SpectralStepper stepper(heat);
      auto z = spectral::SpectralField::constant(n, 1.0);
      const std::size_t every = res.heat_steps / cfg.samples;
      for (std::size_t s = 0; s < res.heat_steps; ++s) {
        stepper.step(spectral::Scheme::milstein, z, heat_noise.step(s), heat_dt);
        if ((s + 1) % every == 0) {
          auto h = hopf_cole(eval.synthesize(z.coeffs));
          for (double& v : h) v *= hc_scale;
          o.hc.push_back(std::move(h));
        }
      }
    });

    std::vector<std::vector<std::vector<double>>> kpz(cfg.realizations), hc(cfg.realizations);
    std::vector<double> mp(cfg.realizations), mr(cfg.realizations);
    for (std::size_t r = 0; r < cfg.realizations; ++r) {
      kpz[r] = out[r].plain;
      hc[r] = out[r].hc;
      mp[r] = stats::mean(out[r].plain.back());
      mr[r] = stats::mean(out[r].renorm_final);
      res.renormalized.push_back(out[r].renorm_final);
      res.hopf_cole.push_back(out[r].hc.back());
      res.max_iterations = std::max(res.max_iterations, out[r].max_iterations);
    }
    res.shift = estimate_shift(times, kpz, hc, cfg.lambda);
    const double shift = 0.5 * cfg.lambda * res.shift.c_hat * T;
    for (std::size_t r = 0; r < cfg.realizations; ++r) {
      auto c = out[r].plain.back();
      for (double& v : c) v -= shift;
      res.corrected.push_back(std::move(c));
    }
    res.mean_plain = stats::mean(mp);
    res.mean_renorm = stats::mean(mr);
    if (cfg.realizations > 1) {
      res.mean_plain_se = stats::standard_error(mp);
      res.mean_renorm_se = stats::standard_error(mr);
    }
    report.levels.push_back(std::move(res));
  }
  return report;
}

std::vector<double> cross_mollifier_distance(const ComparisonReport& a, const ComparisonReport& b) {
  if (a.levels.size() != b.levels.size()) throw ConfigError("levels", "ladders have different lengths");
  if (a.noise_key != b.noise_key) throw ConfigError("noise", "ladders were driven by different noise paths");
  std::vector<double> d;
  for (std::size_t k = 0; k < a.levels.size(); ++k) {
    if (a.levels[k].level.n != b.levels[k].level.n) throw ConfigError("levels", "ladders use different grids");
    d.push_back(spectral::mc_error_norm(a.levels[k].corrected, b.levels[k].corrected));
  }
  return d;
}

std::vector<double> ladder_errors(const ComparisonReport& report) {
  std::vector<double> e;
  for (std::size_t k = 1; k < report.levels.size(); ++k)
    e.push_back(kappa_refinement_error(report.renormalized_profiles(k - 1), report.renormalized_profiles(k)));
  return e;
}

growth::RoughnessSeries hopf_cole_roughness(const HeatRoughnessConfig& cfg) {
  if (cfg.modes == 0) throw ConfigError("modes", "must be positive");
  if (cfg.steps == 0) throw ConfigError("steps", "must be positive");
  if (cfg.realizations == 0) throw ConfigError("realizations", "must be positive");
  if (cfg.per_decade == 0) throw ConfigError("per_decade", "must be positive");
  if (!(cfg.nu > 0.0)) throw ConfigError("nu", "must be positive");
  if (!(cfg.final_time > 0.0)) throw ConfigError("final_time", "must be positive");
  if (!(cfg.first_time > 0.0) || cfg.first_time > cfg.final_time)
    throw ConfigError("first_time", "must lie in (0, final_time]");

  const double dt = cfg.final_time / static_cast<double>(cfg.steps);
  std::vector<std::size_t> record;
  const double ratio = std::pow(10.0, 1.0 / static_cast<double>(cfg.per_decade));
  for (double t = cfg.first_time; t <= cfg.final_time * (1 + 1e-12); t *= ratio) {
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(t / dt)));
    if (record.empty() || n > record.back()) record.push_back(std::min(n, cfg.steps));
  }

  const auto heat = spectral::heat_problem(cfg.modes, cfg.nu, cfg.lambda);
  std::vector<std::vector<double>> w2(cfg.realizations), mean(cfg.realizations);
  parallel_for(cfg.realizations, cfg.workers, [&](std::size_t r) {
    const noise::RngStream stream(cfg.seed, r);
    spectral::SpectralStepper stepper(heat);
    auto z = spectral::SpectralField::constant(cfg.modes, 1.0);
    std::vector<double> dw(cfg.modes);
    std::size_t next = 0;
    for (std::size_t n = 0; n < cfg.steps && next < record.size(); ++n) {
      std::fill(dw.begin(), dw.end(), 0.0);
      noise::accumulate_row(stream, n, std::sqrt(dt), dw);
      stepper.step(cfg.scheme, z, dw, dt);
      if (n + 1 != record[next]) continue;
      const auto h = hopf_cole(stepper.grid().synthesize(z.coeffs));
      const double m = stats::mean(h);
      double v = 0.0;
      for (double x : h) v += (x - m) * (x - m);
      w2[r].push_back(v / static_cast<double>(h.size()));
      mean[r].push_back(m);
      ++next;
    }
  });

  growth::RoughnessSeries out;
  out.L = cfg.modes;
  for (std::size_t k = 0; k < record.size(); ++k) {
    std::vector<double> a(cfg.realizations), b(cfg.realizations);
    for (std::size_t r = 0; r < cfg.realizations; ++r) {
      a[r] = w2[r][k];
      b[r] = mean[r][k];
    }
    out.times.push_back(static_cast<double>(record[k]) * dt);
    out.roughness.push_back(std::sqrt(stats::mean(a)));
    out.mean_height.push_back(stats::mean(b));
  }
  return out;
}

}  // namespace kpz::renorm
