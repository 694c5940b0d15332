#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "io.hpp"
#include "run.hpp"

namespace kpzrun {

const char* version() noexcept;

/// Config echo, version, seed records, wall-clock, optional replayed noise
/// file and the hash of every output.
json build_manifest(const RunConfig& config, const json& seeds, const OutputSink& sink, double wall_seconds,
                    const RunOptions& options);

/// Runs `config`, writes outputs and manifest.json into `out`, returns the manifest.
json execute(const RunConfig& config, const std::filesystem::path& out, const RunOptions& options = {});

struct ReplayMismatch {
  std::string name;
  std::string expected, actual;  ///< SHA-256, empty when the file is missing
};

/// Re-runs the experiment recorded in `manifest` into `out` and lists every
/// output whose hash differs from the recorded one.
std::vector<ReplayMismatch> replay(const std::filesystem::path& manifest, const std::filesystem::path& out);

}  // namespace kpzrun
