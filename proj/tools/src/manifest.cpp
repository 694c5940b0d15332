#include "manifest.hpp"

#include <chrono>
#include <map>

#include "kpz/errors.hpp"

#ifndef KPZ_VERSION
#define KPZ_VERSION "0.0.0"
#endif

namespace kpzrun {

const char* version() noexcept { return KPZ_VERSION; }

json build_manifest(const RunConfig& config, const json& seeds, const OutputSink& sink, double wall_seconds,
                    const RunOptions& options) {
  json m;
  m["version"] = version();
  m["kind"] = config.kind;
  m["config"] = config.values;
  m["seeds"] = seeds;
  m["wall_clock_seconds"] = wall_seconds;
  if (options.replay_noise) {
    const auto path = std::filesystem::absolute(*options.replay_noise);
    m["replay_noise"] = {{"path", path.string()}, {"sha256", sha256_hex(read_file(path))}};
  }
  json outputs = json::array();
  for (const auto& f : sink.files()) outputs.push_back({{"name", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  m["outputs"] = outputs;
  return m;
}

json execute(const RunConfig& config, const std::filesystem::path& out, const RunOptions& options) {
  OutputSink sink(out);
  const auto start = std::chrono::steady_clock::now();
  auto write_manifest = [&](const json& seeds) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto m = build_manifest(config, seeds, sink, wall, options);
    OutputSink(out).write("manifest.json", m.dump(2) + "\n");
    return m;
  };
  try {
    return write_manifest(run_experiment(config, sink, options));
  } catch (const NonConvergence&) {
    // Keep the partial outputs traceable before reporting the failure.
    write_manifest(json::array());
    throw;
  }
}

std::vector<ReplayMismatch> replay(const std::filesystem::path& manifest_path, const std::filesystem::path& out) {
  json m;
  try {
    m = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    throw IoError(manifest_path.string() + " is not a manifest: " + e.what());
  }
  if (!m.contains("config") || !m.contains("outputs")) throw IoError(manifest_path.string() + " is not a manifest");
  RunOptions opt;
  if (m.contains("replay_noise")) {
    const std::filesystem::path noise = m["replay_noise"].at("path").get<std::string>();
    if (sha256_hex(read_file(noise)) != m["replay_noise"].at("sha256").get<std::string>())
      throw IoError("replay noise file " + noise.string() + " changed since the recorded run");
    opt.replay_noise = noise;
  }
  const auto fresh = execute(resolve_config(m["config"]), out, opt);

  std::map<std::string, std::string> now;
  for (const auto& f : fresh["outputs"]) now[f.at("name").get<std::string>()] = f.at("sha256").get<std::string>();
  std::vector<ReplayMismatch> diff;
  for (const auto& f : m["outputs"]) {
    const auto name = f.at("name").get<std::string>();
    const auto want = f.at("sha256").get<std::string>();
    const auto it = now.find(name);
    const std::string got = it == now.end() ? "" : it->second;
    if (got != want) diff.push_back({name, want, got});
    if (it != now.end()) now.erase(it);
  }
  for (const auto& [name, hash] : now) diff.push_back({name, "", hash});
  return diff;
}

}  // namespace kpzrun
