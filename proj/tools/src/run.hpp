#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>

#include "config.hpp"
#include "io.hpp"

namespace kpzrun {

/// A solver finished without meeting its tolerance; outputs written so far
/// are kept for inspection.
class NonConvergence : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  /// Noise increments to drive a single realization (heat-spectral
  /// trajectory and kpz-mhfe stochastic runs only).
  std::optional<std::filesystem::path> replay_noise;
};

/// Executes the configured experiment, writing its CSV files through `sink`.
/// Returns the per-realization seed records for the manifest.
json run_experiment(const RunConfig& config, OutputSink& sink, const RunOptions& options = {});

}  // namespace kpzrun
