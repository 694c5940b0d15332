#include "run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include "kpz/basis.hpp"
#include "kpz/errors.hpp"
#include "kpz/growth.hpp"
#include "kpz/mhfe.hpp"
#include "kpz/noise.hpp"
#include "kpz/parallel.hpp"
#include "kpz/renorm.hpp"
#include "kpz/renorm_study.hpp"
#include "kpz/spectral.hpp"
#include "kpz/stats.hpp"

namespace kpzrun {

using kpz::ConfigError;

namespace {

json stream_seeds(std::uint64_t seed, std::size_t realizations) {
  json out = json::array();
  for (std::size_t r = 0; r < realizations; ++r) out.push_back({{"realization", r}, {"seed", seed}, {"stream", r}});
  return out;
}

std::size_t step_count(const RunConfig& c, std::size_t j) {
  const double s = c.number("steps_coefficient") * std::pow(static_cast<double>(j), c.number("steps_exponent"));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(s)));
}

kpz::mhfe::StromatoliteParams stromatolite(const RunConfig& c) {
  const auto& s = c.values.at("stromatolite");
  kpz::mhfe::StromatoliteParams p;
  p.A = s.at("A").get<double>();
  p.B = s.at("B").get<double>();
  p.x0 = s.at("x0").get<double>();
  p.v = s.at("v").get<double>();
  p.nu = c.values.contains("nu") ? c.number("nu") : 1.0;
  p.lambda = c.values.contains("lambda") ? c.number("lambda") : p.nu;
  return p;
}

// Noise file problems are I/O failures for the runner.
kpz::noise::NoiseRealization load_replay(const std::filesystem::path& path) {
  try {
    return kpz::noise::read_replay(path);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

std::string fixed_name(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// ------------------------------------------------------------- heat-spectral

json heat_spectral(const RunConfig& c, OutputSink& sink, const RunOptions& o) {
  namespace sp = kpz::spectral;
  const auto study = c.text("study");
  const auto modes = c.counts("modes");
  const double nu = c.number("nu"), lambda = c.number("lambda"), T = c.number("final_time");
  if (o.replay_noise && study != "trajectory")
    throw ConfigError("replay-noise", "noise replay drives the trajectory study only");

  if (study == "refinement") {
    sp::RefinementOptions opt;
    opt.final_time = T;
    opt.realizations = c.count("realizations");
    opt.seed = c.seed();
    opt.workers = c.workers();
    opt.steps = [&c](std::size_t j) { return step_count(c, j); };
    Csv csv{"scheme", "j_coarse", "j_fine", "error"};
    for (const auto& name : c.texts("schemes")) {
      const auto scheme = sp::scheme_from_string(name);
      const auto rows =
          sp::refinement_study([&](std::size_t j) { return sp::heat_problem(j, nu, lambda); }, scheme, modes, opt);
      for (const auto& r : rows) csv.cell(name).cell(r.j_coarse).cell(r.j_fine).cell(r.error).end_row();
    }
    sink.write("refinement.csv", csv.text());
    return stream_seeds(c.seed(), c.count("realizations"));
  }

  if (study == "roughness") {
    kpz::renorm::HeatRoughnessConfig h;
    h.modes = modes.front();
    h.nu = nu;
    h.lambda = lambda;
    h.final_time = T;
    h.steps = step_count(c, h.modes);
    h.scheme = sp::scheme_from_string(c.texts("schemes").front());
    h.first_time = c.number("first_time");
    h.per_decade = c.count("per_decade");
    h.realizations = c.count("realizations");
    h.seed = c.seed();
    h.workers = c.workers();
    const auto s = kpz::renorm::hopf_cole_roughness(h);
    Csv csv{"t", "w", "mean_height"};
    for (std::size_t k = 0; k < s.times.size(); ++k)
      csv.cell(s.times[k]).cell(s.roughness[k]).cell(s.mean_height[k]).end_row();
    sink.write("roughness.csv", csv.text());
    const auto f = kpz::growth::fit_two_regimes(s);
    Csv fit{"early_slope", "early_slope_se", "late_slope", "late_slope_se", "slope_ratio", "crossover"};
    fit.cell(f.early.slope).cell(f.early.slope_se).cell(f.late.slope).cell(f.late.slope_se).cell(f.slope_ratio());
    fit.cell(f.crossover).end_row();
    sink.write("two_regime_fit.csv", fit.text());
    return stream_seeds(c.seed(), h.realizations);
  }

  // Trajectories of every listed scheme on the same noise.
  const std::size_t J = modes.front();
  std::size_t realizations = c.count("realizations");
  std::optional<kpz::noise::NoiseRealization> replay;
  if (o.replay_noise) {
    replay = load_replay(*o.replay_noise);
    if (realizations != 1) throw ConfigError("realizations", "a replayed noise path drives exactly one realization");
    if (replay->modes() != J) throw ConfigError("modes", "replay file has " + std::to_string(replay->modes()) + " modes");
    if (std::abs(replay->dt * double(replay->n_time()) - T) > 1e-9 * T)
      throw ConfigError("final_time", "replay file covers a different time span");
  }
  const auto problem = sp::heat_problem(J, nu, lambda);
  const sp::SpectralStepper stepper(problem);
  const auto& grid = stepper.grid();
  const std::size_t every = c.count("record_every");
  Csv csv{"scheme", "realization", "t", "x", "z"};
  for (const auto& name : c.texts("schemes")) {
    const auto scheme = sp::scheme_from_string(name);
    std::vector<sp::Trajectory> runs(realizations);
    kpz::parallel_for(realizations, c.workers(), [&](std::size_t r) {
      const std::size_t steps = step_count(c, J);
      const auto noise = replay ? *replay
                                : kpz::noise::draw_gaussian_matrix(kpz::noise::RngStream(c.seed(), r), steps, J,
                                                                   T / double(steps));
      runs[r] = sp::integrate(problem, scheme, sp::SpectralField::constant(J, 1.0), noise);
    });
    for (std::size_t r = 0; r < realizations; ++r) {
      const auto& tr = runs[r];
      for (std::size_t n = 0; n < tr.states.size(); ++n) {
        if (n % every != 0 && n + 1 != tr.states.size()) continue;
        const auto z = grid.synthesize(tr.states[n].coeffs);
        for (std::size_t i = 0; i < z.size(); ++i)
          csv.cell(name).cell(r).cell(double(n) * tr.dt).cell(grid.nodes()[i]).cell(z[i]).end_row();
      }
    }
  }
  sink.write("trajectory.csv", csv.text());
  if (replay) return json::array({{{"realization", 0}, {"replay", o.replay_noise->string()}}});
  return stream_seeds(c.seed(), realizations);
}

// ------------------------------------------------------------------ kpz-mhfe

json kpz_mhfe(const RunConfig& c, OutputSink& sink, const RunOptions& o) {
  namespace mh = kpz::mhfe;
  const std::size_t m = c.count("m");
  const double T = c.number("final_time");

  if (c.text("problem") == "stromatolite") {
    if (o.replay_noise) throw ConfigError("replay-noise", "the stromatolite problem has no noise");
    mh::ConvergenceSetup s;
    s.exact = stromatolite(c);
    s.chi = c.number("chi");
    s.final_time = T;
    s.dt_over_dx = c.number("dt_over_dx");
    s.tol = c.number("tol");
    s.max_iters = c.count("max_iters");
    s.record_every = c.count("record_every");
    const auto run = mh::run_stromatolite(m, s);
    Csv prof{"t", "x", "h", "exact"};
    Csv err{"t", "max_abs", "l2_abs"};
    const auto centers = run.mesh.centers();
    for (std::size_t k = 0; k < run.march.H.size(); ++k) {
      const double t = run.march.times[k];
      std::vector<double> ex(m);
      for (std::size_t j = 0; j < m; ++j) {
        ex[j] = mh::stromatolite_exact(t, centers[j], s.exact);
        prof.cell(t).cell(centers[j]).cell(run.march.H[k][j]).cell(ex[j]).end_row();
      }
      err.cell(t)
          .cell(mh::field_error(run.march.H[k], ex, run.mesh.dx(), mh::ErrorNorm::max_abs))
          .cell(mh::field_error(run.march.H[k], ex, run.mesh.dx(), mh::ErrorNorm::l2_abs))
          .end_row();
    }
    sink.write("profiles.csv", prof.text());
    sink.write("errors.csv", err.text());
    if (!run.march.converged)
      throw NonConvergence("stromatolite march stopped at step " + std::to_string(run.march.failed_step) +
                           " (relative change " + std::to_string(run.march.last_error) + ")");
    return json::array();
  }

  // Periodic KPZ on [0, 1] driven by mollified white noise on m modes.
  const mh::Mesh1D mesh(0.0, 1.0, m);
  std::size_t steps = static_cast<std::size_t>(std::ceil(T / (c.number("dt_over_dx") * mesh.dx()) - 1e-9));
  std::size_t realizations = c.count("realizations");
  std::optional<kpz::noise::NoiseRealization> replay;
  if (o.replay_noise) {
    replay = load_replay(*o.replay_noise);
    if (realizations != 1) throw ConfigError("realizations", "a replayed noise path drives exactly one realization");
    if (std::abs(replay->dt * double(replay->n_time()) - T) > 1e-9 * T)
      throw ConfigError("final_time", "replay file covers a different time span");
    steps = replay->n_time();
  }
  const double dt = T / double(steps);
  const kpz::noise::Mollifier phi(kpz::noise::mollifier_kind_from_string(c.text("mollifier")), c.number("kappa"));
  const auto constants = kpz::renorm::renorm_constants(phi);
  mh::KpzParameters p;
  p.nu = c.number("nu");
  p.lambda = c.number("lambda");
  // χ = 0 selects χ = Δx.
  p.chi1 = p.chi2 = c.number("chi") > 0.0 ? c.number("chi") : mesh.dx();
  p.dt = dt;
  p.tol = c.number("tol");
  p.max_iters = c.count("max_iters");
  mh::MarchOptions opt;
  opt.final_time = T;
  opt.record_every = c.count("record_every");
  const double scale = c.flag("renormalize") ? 0.5 * p.lambda : 0.0;

  std::vector<kpz::noise::NoiseRealization> noises(realizations);
  std::vector<mh::MarchResult> runs(realizations);
  kpz::parallel_for(realizations, c.workers(), [&](std::size_t r) {
    noises[r] = replay ? *replay
                       : kpz::noise::draw_gaussian_matrix(kpz::noise::RngStream(c.seed(), r), steps, m, dt);
    const auto forcing = mh::matrix_forcing(kpz::renorm::renormalized_forcing(noises[r], phi, constants, m, scale));
    runs[r] = mh::time_march(mesh, std::vector<double>(m, 0.0), mh::Boundary::periodic(), forcing, p, opt);
  });

  Csv prof{"realization", "t", "x", "h"};
  Csv summary{"realization", "mean_height", "roughness", "max_iterations", "converged"};
  const auto centers = mesh.centers();
  std::string failure;
  for (std::size_t r = 0; r < realizations; ++r) {
    const auto& run = runs[r];
    for (std::size_t k = 0; k < run.H.size(); ++k)
      for (std::size_t j = 0; j < m; ++j) prof.cell(r).cell(run.times[k]).cell(centers[j]).cell(run.H[k][j]).end_row();
    const auto& last = run.H.back();
    const double mean = kpz::stats::mean(last);
    double w2 = 0.0;
    for (double v : last) w2 += (v - mean) * (v - mean);
    summary.cell(r).cell(mean).cell(std::sqrt(w2 / double(m))).cell(run.max_iterations);
    summary.cell(std::string_view(run.converged ? "true" : "false")).end_row();
    if (!run.converged && failure.empty())
      failure = "realization " + std::to_string(r) + " stopped at step " + std::to_string(run.failed_step);
    if (c.flag("dump_noise")) {
      const std::string name = "noise_" + std::to_string(r) + ".bin";
      try {
        kpz::noise::write_binary(sink.dir() / name, noises[r]);
      } catch (const std::runtime_error& e) {
        throw IoError(e.what());
      }
      sink.write(name, read_file(sink.dir() / name));
    }
  }
  Csv constants_csv{"mollifier", "kappa", "C1", "C2", "C3", "C_total", "subtracted"};
  constants_csv.cell(c.text("mollifier")).cell(phi.kappa()).cell(constants.c1).cell(constants.c2);
  constants_csv.cell(constants.c3).cell(constants.c_total).cell(scale * constants.c_total).end_row();
  sink.write("profiles.csv", prof.text());
  sink.write("summary.csv", summary.text());
  sink.write("constants.csv", constants_csv.text());
  if (!failure.empty()) throw NonConvergence(failure);
  if (replay) return json::array({{{"realization", 0}, {"replay", o.replay_noise->string()}}});
  return stream_seeds(c.seed(), realizations);
}

// -------------------------------------------------------------------- growth

json growth(const RunConfig& c, OutputSink& sink) {
  namespace gr = kpz::growth;
  const auto model = gr::model_from_string(c.text("model"));
  const std::size_t runs = c.count("realizations");
  std::vector<gr::RoughnessSeries> series;
  json seeds = json::array();
  for (auto L : c.counts("sizes")) {
    const double t_max = c.number("t_max_coefficient") * std::pow(double(L), c.number("t_max_exponent"));
    const auto times = gr::geometric_times(std::min(1.0, t_max), t_max, c.count("per_decade"), L);
    const auto e = gr::simulate_ensemble(model, L, times, runs, c.seed(), c.workers());
    Csv csv{"t", "mean_height", "w", "w2_stderr"};
    for (std::size_t k = 0; k < times.size(); ++k)
      csv.cell(times[k]).cell(e.series.mean_height[k]).cell(e.series.roughness[k]).cell(e.w2_stderr[k]).end_row();
    sink.write("roughness_L" + std::to_string(L) + ".csv", csv.text());
    series.push_back(e.series);
    for (std::size_t r = 0; r < runs; ++r)
      seeds.push_back({{"L", L}, {"run", r}, {"seed", c.seed()}, {"stream", L}, {"substream", r}});
  }
  if (c.flag("fit")) {
    gr::FitOptions opt;
    opt.t_min = c.number("t_min");
    opt.growth_fraction = c.number("growth_fraction");
    opt.saturation_factor = c.number("saturation_factor");
    opt.shared_slope_crossover = c.flag("shared_slope_crossover");
    const auto f = gr::fit_exponents(series, opt);
    Csv fit{"alpha", "alpha_se", "beta", "beta_se", "z", "z_se", "closure_gap", "closure_se"};
    fit.cell(f.alpha).cell(f.alpha_se).cell(f.beta).cell(f.beta_se).cell(f.z).cell(f.z_se);
    fit.cell(f.closure_gap()).cell(f.closure_se()).end_row();
    sink.write("fit.csv", fit.text());
    Csv sizes{"L", "t_x", "w_sat", "beta", "window_lo", "window_hi"};
    for (std::size_t k = 0; k < f.sizes.size(); ++k) {
      sizes.cell(f.sizes[k]).cell(f.crossover[k]).cell(f.saturation[k]).cell(f.beta_per_size[k]);
      sizes.cell(f.beta_windows[k].first).cell(f.beta_windows[k].second).end_row();
    }
    sink.write("fit_sizes.csv", sizes.text());
    const auto col = gr::family_vicsek_collapse(series, f.alpha, f.z);
    Csv collapse{"L", "u", "y"};
    for (std::size_t k = 0; k < series.size(); ++k)
      for (std::size_t i = 0; i < col.u[k].size(); ++i) collapse.cell(series[k].L).cell(col.u[k][i]).cell(col.y[k][i]).end_row();
    sink.write("collapse.csv", collapse.text());
  }
  return seeds;
}

// --------------------------------------------------------- convergence-study

json convergence(const RunConfig& c, OutputSink& sink) {
  namespace mh = kpz::mhfe;
  mh::ConvergenceSetup s;
  s.exact = stromatolite(c);
  s.chi = c.number("chi");
  s.final_time = c.number("final_time");
  s.dt_over_dx = c.number("dt_over_dx");
  s.norm = mh::error_norm_from_string(c.text("norm"));
  s.tol = c.number("tol");
  s.max_iters = c.count("max_iters");
  s.workers = c.workers();
  const auto table = mh::convergence_study(c.counts("m"), s);
  Csv csv{"m", "dx", "dt", "error", "steps", "iterations", "converged"};
  std::string failure;
  for (const auto& r : table.rows) {
    csv.cell(r.m).cell(r.dx).cell(r.dt).cell(r.error).cell(r.steps).cell(r.iterations);
    csv.cell(std::string_view(r.converged ? "true" : "false")).end_row();
    if (!r.converged && failure.empty()) failure = "mesh m=" + std::to_string(r.m) + " did not converge";
  }
  sink.write("table.csv", csv.text());
  Csv order{"order", "order_se"};
  order.cell(table.order).cell(table.order_se).end_row();
  sink.write("order.csv", order.text());
  if (!failure.empty()) throw NonConvergence(failure);
  return json::array();
}

// ------------------------------------------------------------------- renorm

kpz::renorm::PipelineConfig pipeline(const RunConfig& c) {
  kpz::renorm::PipelineConfig p;
  p.nu = c.number("nu");
  p.lambda = c.number("lambda");
  p.chi = c.number("chi");
  p.final_time = c.number("final_time");
  p.samples = c.count("samples");
  p.realizations = c.count("realizations");
  p.seed = c.seed();
  p.workers = c.workers();
  p.tol = c.number("tol");
  p.max_iters = c.count("max_iters");
  p.heat_min_steps = c.count("heat_min_steps");
  return p;
}

void write_reports(const std::vector<kpz::renorm::ComparisonReport>& reports,
                   const std::string& table_name, OutputSink& sink) {
  Csv table{"mollifier", "n", "kappa", "C1", "C2", "C3", "C_total", "C_hat_empirical", "C_hat_se",
            "residual_error", "mean_plain", "mean_plain_se", "mean_renorm", "mean_renorm_se", "mhfe_steps",
            "heat_steps", "max_iterations"};
  Csv gaps{"mollifier", "n", "kappa", "t", "mean_gap"};
  for (const auto& rep : reports) {
    const std::string kind = kpz::noise::to_string(rep.kind);
    for (const auto& L : rep.levels) {
      const auto& k = L.constants;
      table.cell(kind).cell(L.level.n).cell(L.level.kappa).cell(k.c1).cell(k.c2).cell(k.c3).cell(k.c_total);
      table.cell(L.shift.c_hat).cell(L.shift.c_hat_se).cell(L.shift.residual).cell(L.mean_plain);
      table.cell(L.mean_plain_se).cell(L.mean_renorm).cell(L.mean_renorm_se).cell(L.mhfe_steps);
      table.cell(L.heat_steps).cell(L.max_iterations).end_row();
      const std::size_t samples = L.shift.mean_gap.size();
      for (std::size_t s = 0; s < samples; ++s) {
        const double t = rep.final_time * double(s + 1) / double(samples);
        gaps.cell(kind).cell(L.level.n).cell(L.level.kappa).cell(t).cell(L.shift.mean_gap[s]).end_row();
      }
      // Ensemble means of the final profiles on the cell centres.
      Csv prof{"x", "renormalized", "hopf_cole", "corrected", "renormalized_r0", "hopf_cole_r0"};
      const std::size_t n = L.level.n, M = L.renormalized.size();
      for (std::size_t j = 0; j < n; ++j) {
        double a = 0.0, b = 0.0, d = 0.0;
        for (std::size_t r = 0; r < M; ++r) {
          a += L.renormalized[r][j];
          b += L.hopf_cole[r][j];
          d += L.corrected[r][j];
        }
        prof.cell((double(j) + 0.5) / double(n)).cell(a / double(M)).cell(b / double(M)).cell(d / double(M));
        prof.cell(L.renormalized[0][j]).cell(L.hopf_cole[0][j]).end_row();
      }
      sink.write("profiles_" + kind + "_n" + std::to_string(n) + "_kappa" + fixed_name(L.level.kappa) + ".csv",
                 prof.text());
    }
  }
  sink.write(table_name, table.text());
  sink.write("shift_gaps.csv", gaps.text());
}

json renorm_compare(const RunConfig& c, OutputSink& sink) {
  std::vector<kpz::renorm::Level> levels;
  for (const auto& L : c.values.at("levels"))
    levels.push_back({L.at("n").get<std::size_t>(), L.at("kappa").get<double>()});
  std::vector<kpz::renorm::ComparisonReport> reports;
  for (const auto& name : c.texts("mollifiers"))
    reports.push_back(kpz::renorm::run_comparison(levels, kpz::noise::mollifier_kind_from_string(name), pipeline(c)));
  write_reports(reports, "comparison.csv", sink);
  return stream_seeds(c.seed(), c.count("realizations"));
}

json renorm_ladder(const RunConfig& c, OutputSink& sink) {
  const auto levels = kpz::renorm::ladder_levels(c.count("n0"), c.numbers("kappas"));
  std::vector<kpz::renorm::ComparisonReport> reports;
  for (const auto& name : c.texts("mollifiers"))
    reports.push_back(kpz::renorm::run_comparison(levels, kpz::noise::mollifier_kind_from_string(name), pipeline(c)));
  write_reports(reports, "ladder.csv", sink);

  Csv errors{"mollifier", "n_coarse", "n_fine", "kappa_fine", "error"};
  for (const auto& rep : reports) {
    const auto e = kpz::renorm::ladder_errors(rep);
    for (std::size_t k = 0; k < e.size(); ++k) {
      errors.cell(std::string_view(kpz::noise::to_string(rep.kind))).cell(rep.levels[k].level.n);
      errors.cell(rep.levels[k + 1].level.n).cell(rep.levels[k + 1].level.kappa).cell(e[k]).end_row();
    }
  }
  sink.write("ladder_errors.csv", errors.text());
  if (reports.size() >= 2) {
    const auto d = kpz::renorm::cross_mollifier_distance(reports[0], reports[1]);
    Csv cross{"n", "kappa", "distance"};
    for (std::size_t k = 0; k < d.size(); ++k) cross.cell(levels[k].n).cell(levels[k].kappa).cell(d[k]).end_row();
    sink.write("cross_mollifier.csv", cross.text());
  }
  return stream_seeds(c.seed(), c.count("realizations"));
}

}  // namespace

json run_experiment(const RunConfig& c, OutputSink& sink, const RunOptions& o) {
  const bool noisy = c.kind == "heat-spectral" || c.kind == "kpz-mhfe";
  if (o.replay_noise && !noisy) throw ConfigError("replay-noise", "not supported for " + c.kind);
  if (c.kind == "heat-spectral") return heat_spectral(c, sink, o);
  if (c.kind == "kpz-mhfe") return kpz_mhfe(c, sink, o);
  if (c.kind == "growth") return growth(c, sink);
  if (c.kind == "convergence-study") return convergence(c, sink);
  if (c.kind == "renorm-compare") return renorm_compare(c, sink);
  if (c.kind == "renorm-ladder") return renorm_ladder(c, sink);
  throw ConfigError("kind", "unknown experiment kind '" + c.kind + "'");
}

}  // namespace kpzrun
