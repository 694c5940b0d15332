#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "config.hpp"
#include "kpz/errors.hpp"
#include "manifest.hpp"
#include "plotdata.hpp"
#include "run.hpp"

namespace {

enum Exit : int { ok = 0, other = 1, usage = 2, no_convergence = 3, io = 4, mismatch = 5 };

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out;
  std::string replay_noise;
};

int run_kind(const std::string& kind, const RunArgs& a) {
  using namespace kpzrun;
  json raw = a.config.empty() ? json{{"kind", kind}} : read_config_file(a.config);
  if (!raw.is_object()) throw kpz::ConfigError("config", "expected a JSON object");
  if (!raw.contains("kind")) raw["kind"] = kind;
  if (raw["kind"] != kind)
    throw kpz::ConfigError("kind", "config is for '" + raw["kind"].dump() + "' but the subcommand is '" + kind + "'");
  if (a.seed) raw["seed"] = *a.seed;
  if (a.workers) raw["workers"] = *a.workers;
  RunOptions opt;
  if (!a.replay_noise.empty()) opt.replay_noise = a.replay_noise;
  const auto config = resolve_config(raw);
  const auto out = a.out.empty() ? std::filesystem::path("runs") / kind : std::filesystem::path(a.out);
  const auto m = execute(config, out, opt);
  std::cout << "wrote " << m["outputs"].size() << " files and manifest.json to " << out.string() << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kpzrun: stochastic heat and KPZ experiments"};
  app.set_version_flag("--version", kpzrun::version());
  app.require_subcommand(1);

  RunArgs args;
  std::string chosen;
  for (const auto& kind : kpzrun::experiment_kinds()) {
    auto* sub = app.add_subcommand(kind, "run a " + kind + " experiment");
    sub->add_option("--config", args.config, "JSON config (comments allowed); omitted fields take defaults")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", args.seed, "override the config seed");
    sub->add_option("--workers", args.workers, "worker threads (results do not depend on it)");
    sub->add_option("--out", args.out, "output directory (default runs/<kind>)");
    sub->add_option("--replay-noise", args.replay_noise, "noise increments file (CSV or binary) for one realization")
        ->check(CLI::ExistingFile);
    sub->callback([&chosen, kind] { chosen = kind; });
  }

  std::string manifest, replay_out;
  auto* rep = app.add_subcommand("replay", "re-run a manifest and compare output hashes");
  rep->add_option("manifest", manifest, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);
  rep->add_option("--out", replay_out, "output directory for the re-run")->required();
  rep->callback([&chosen] { chosen = "replay"; });

  std::string plot_dir;
  auto* plot = app.add_subcommand("plotdata", "write plot_*.dat files from the CSV outputs of a run");
  plot->add_option("dir", plot_dir, "run output directory")->required();
  plot->callback([&chosen] { chosen = "plotdata"; });

  std::string defaults_kind;
  auto* defs = app.add_subcommand("defaults", "print the default config of an experiment kind");
  defs->add_option("kind", defaults_kind, "experiment kind")->required();
  defs->callback([&chosen] { chosen = "defaults"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  try {
    if (chosen == "defaults") {
      std::cout << kpzrun::default_config(defaults_kind).dump(2) << "\n";
      return ok;
    }
    if (chosen == "plotdata") {
      kpzrun::OutputSink sink(plot_dir);
      kpzrun::emit_plotdata(plot_dir, sink);
      std::cout << "wrote " << sink.files().size() << " plot files to " << plot_dir << "\n";
      return ok;
    }
    if (chosen == "replay") {
      const auto diff = kpzrun::replay(manifest, replay_out);
      if (diff.empty()) {
        std::cout << "replay matches " << manifest << "\n";
        return ok;
      }
      for (const auto& d : diff)
        std::cerr << "mismatch " << d.name << ": expected " << (d.expected.empty() ? "<absent>" : d.expected)
                  << ", got " << (d.actual.empty() ? "<absent>" : d.actual) << "\n";
      return mismatch;
    }
    return run_kind(chosen, args);
  } catch (const kpz::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return usage;
  } catch (const kpz::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return usage;
  } catch (const kpz::ConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return no_convergence;
  } catch (const kpzrun::NonConvergence& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return no_convergence;
  } catch (const kpzrun::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return io;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return io;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return other;
  }
}
