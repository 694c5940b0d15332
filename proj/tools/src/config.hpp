#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace kpzrun {

using nlohmann::json;

/// Experiment families the runner knows.
const std::vector<std::string>& experiment_kinds();

/// Every field of `kind` with its default value. The example configs under
/// tools/configs/ document units and meaning for each one.
json default_config(const std::string& kind);

/// A validated configuration: `values` holds every field of the kind, the
/// defaults filled in, so it doubles as the manifest's config echo.
struct RunConfig {
  std::string kind;
  json values;

  std::uint64_t seed() const;
  unsigned workers() const;

  double number(const std::string& field) const;
  std::size_t count(const std::string& field) const;
  bool flag(const std::string& field) const;
  std::string text(const std::string& field) const;
  std::vector<double> numbers(const std::string& field) const;
  std::vector<std::size_t> counts(const std::string& field) const;
  std::vector<std::string> texts(const std::string& field) const;
};

/// Merges `raw` over the defaults of raw["kind"], rejects unknown fields and
/// wrongly typed values, then checks physical admissibility (ν > 0, κ > 0,
/// m ≥ 2, M ≥ 1, ...). Throws kpz::ConfigError naming the offending field.
RunConfig resolve_config(const json& raw);

/// Reads a JSON file; `//` and `/* */` comments are allowed.
json read_config_file(const std::filesystem::path& path);

}  // namespace kpzrun
