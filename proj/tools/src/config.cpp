#include "config.hpp"

#include <algorithm>

#include "io.hpp"
#include "kpz/errors.hpp"
#include "kpz/growth.hpp"
#include "kpz/mhfe.hpp"
#include "kpz/noise.hpp"
#include "kpz/spectral.hpp"

namespace kpzrun {

using kpz::ConfigError;

namespace {

json common(const std::string& kind, std::size_t realizations) {
  return {{"kind", kind}, {"seed", 1}, {"workers", 1}, {"realizations", realizations}};
}

json stromatolite_fields() {
  return {{"A", -1.0}, {"B", 1.0}, {"x0", 0.0}, {"v", 1.0}};
}

json renorm_fields() {
  return {{"mollifiers", {"bump"}}, {"nu", 0.5}, {"lambda", 1.0}, {"chi", 0.0}, {"final_time", 1.0 / 64.0},
          {"samples", 8}, {"heat_min_steps", 4096}, {"tol", 1e-10}, {"max_iters", 10000}};
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

const json& field_of(const json& values, const std::string& field) {
  const auto it = values.find(field);
  if (it == values.end()) throw ConfigError(field, "missing field");
  return *it;
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"heat-spectral", "kpz-mhfe",      "growth",
                                              "renorm-compare", "renorm-ladder", "convergence-study"};
  return kinds;
}

json default_config(const std::string& kind) {
  if (kind == "heat-spectral") {
    auto j = common(kind, 50);
    j.update({{"study", "refinement"},
              {"schemes", {"lord-rougemont", "milstein"}},
              {"modes", {2, 4, 8, 16, 32}},
              {"nu", 1.0},
              {"lambda", 1.0},
              {"final_time", 1.0},
              {"steps_coefficient", 1.0},
              {"steps_exponent", 3.0},
              {"first_time", 1e-4},
              {"per_decade", 10},
              {"record_every", 1}});
    return j;
  }
  if (kind == "kpz-mhfe") {
    auto j = common(kind, 1);
    j.update({{"problem", "stromatolite"},
              {"m", 64},
              {"nu", 1.0},
              {"lambda", 1.0},
              {"chi", 0.1},
              {"final_time", 1.0},
              {"dt_over_dx", 1.0 / 16.0},
              {"tol", 1e-10},
              {"max_iters", 100000},
              {"record_every", 0},
              {"stromatolite", stromatolite_fields()},
              {"mollifier", "bump"},
              {"kappa", 1.0},
              {"renormalize", true},
              {"dump_noise", false}});
    return j;
  }
  if (kind == "growth") {
    auto j = common(kind, 100);
    j.update({{"model", "ballistic"},
              {"sizes", {64, 128, 256, 512}},
              {"t_max_coefficient", 2.0},
              {"t_max_exponent", 1.5},
              {"per_decade", 10},
              {"fit", true},
              {"t_min", 1.0},
              {"growth_fraction", 0.25},
              {"saturation_factor", 4.0},
              {"shared_slope_crossover", false}});
    return j;
  }
  if (kind == "convergence-study") {
    auto j = common(kind, 1);
    j.update({{"m", {128, 256, 512, 1024}},
              {"chi", 0.1},
              {"final_time", 1.0},
              {"dt_over_dx", 1.0 / 16.0},
              {"norm", "max"},
              {"tol", 1e-10},
              {"max_iters", 100000},
              {"stromatolite", stromatolite_fields()}});
    return j;
  }
  if (kind == "renorm-compare") {
    auto j = common(kind, 20);
    j.update(renorm_fields());
    j["levels"] = json::array({json{{"n", 8}, {"kappa", 1.0}}, json{{"n", 16}, {"kappa", 0.5}}});
    return j;
  }
  if (kind == "renorm-ladder") {
    auto j = common(kind, 20);
    j.update(renorm_fields());
    j["mollifiers"] = {"bump", "gaussian"};
    j["n0"] = 8;
    j["kappas"] = {1.0, 0.5, 0.25, 0.125, 0.0625};
    return j;
  }
  std::string known;
  for (const auto& k : experiment_kinds()) known += (known.empty() ? "" : ", ") + k;
  throw ConfigError("kind", "unknown experiment kind '" + kind + "' (expected one of " + known + ")");
}

std::uint64_t RunConfig::seed() const { return static_cast<std::uint64_t>(count("seed")); }
unsigned RunConfig::workers() const { return static_cast<unsigned>(count("workers")); }

double RunConfig::number(const std::string& field) const { return field_of(values, field).get<double>(); }
std::size_t RunConfig::count(const std::string& field) const { return field_of(values, field).get<std::size_t>(); }
bool RunConfig::flag(const std::string& field) const { return field_of(values, field).get<bool>(); }
std::string RunConfig::text(const std::string& field) const { return field_of(values, field).get<std::string>(); }
std::vector<double> RunConfig::numbers(const std::string& field) const {
  return field_of(values, field).get<std::vector<double>>();
}
std::vector<std::size_t> RunConfig::counts(const std::string& field) const {
  return field_of(values, field).get<std::vector<std::size_t>>();
}
std::vector<std::string> RunConfig::texts(const std::string& field) const {
  return field_of(values, field).get<std::vector<std::string>>();
}

namespace {

// Same JSON type family; integers are accepted where numbers are expected.
bool compatible(const json& def, const json& v) {
  // Integer defaults are counts.
  if (def.is_number_integer()) return v.is_number_integer() && v.get<long long>() >= 0;
  if (def.is_number()) return v.is_number();
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_string()) return v.is_string();
  if (def.is_array()) return v.is_array();
  if (def.is_object()) return v.is_object();
  return false;
}

void merge(json& target, const json& raw, const std::string& prefix) {
  if (!raw.is_object()) throw ConfigError(prefix.empty() ? "config" : prefix, "expected an object");
  for (auto it = raw.begin(); it != raw.end(); ++it) {
    const std::string name = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!target.contains(it.key())) throw ConfigError(name, "unknown field");
    json& slot = target[it.key()];
    if (!compatible(slot, *it)) throw ConfigError(name, slot.is_number_integer() ? "expected a non-negative integer"
                                                        : "expected a value like " + slot.dump());
    if (slot.is_object()) merge(slot, *it, name);
    else slot = *it;
  }
}

template <class T>
std::vector<T> typed_array(const json& values, const std::string& field, const char* what) {
  try {
    return values.at(field).get<std::vector<T>>();
  } catch (const json::exception&) {
    throw ConfigError(field, std::string("expected an array of ") + what);
  }
}

void check_positive(const RunConfig& c, const std::string& field) {
  require(c.number(field) > 0.0, field, "must be positive");
}

void check_enum(const std::string& field, const std::string& value, const std::vector<std::string>& allowed) {
  if (std::find(allowed.begin(), allowed.end(), value) != allowed.end()) return;
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
  throw ConfigError(field, "'" + value + "' is not one of " + list);
}

void check_scheme(const std::string& field, const std::string& name) {
  try {
    kpz::spectral::scheme_from_string(name);
  } catch (const std::exception&) {
    throw ConfigError(field, "unknown scheme '" + name + "'");
  }
}

void check_mollifier(const std::string& field, const std::string& name) {
  try {
    kpz::noise::mollifier_kind_from_string(name);
  } catch (const std::exception&) {
    throw ConfigError(field, "unknown mollifier '" + name + "'");
  }
}

void check_renorm_common(const RunConfig& c) {
  check_positive(c, "nu");
  require(c.number("lambda") != 0.0, "lambda", "must be nonzero");
  require(c.number("chi") >= 0.0, "chi", "must be positive, or 0 for chi = dx");
  check_positive(c, "final_time");
  require(c.count("samples") >= 1, "samples", "must be at least 1");
  const auto m = typed_array<std::string>(c.values, "mollifiers", "strings");
  require(!m.empty(), "mollifiers", "needs at least one mollifier");
  for (const auto& name : m) check_mollifier("mollifiers", name);
}

void validate(const RunConfig& c) {
  require(c.count("realizations") >= 1, "realizations", "must be at least 1");
  const auto& k = c.kind;
  if (k == "heat-spectral") {
    check_enum("study", c.text("study"), {"refinement", "roughness", "trajectory"});
    const auto modes = typed_array<std::size_t>(c.values, "modes", "positive integers");
    require(!modes.empty(), "modes", "needs at least one mode count");
    for (auto j : modes) require(j >= 1, "modes", "mode counts must be at least 1");
    if (c.text("study") == "refinement") {
      require(modes.size() >= 2, "modes", "a refinement study needs at least two mode counts");
      require(std::is_sorted(modes.begin(), modes.end()), "modes", "must be increasing");
    } else {
      require(modes.size() == 1, "modes", "roughness and trajectory studies take a single mode count");
    }
    const auto schemes = typed_array<std::string>(c.values, "schemes", "strings");
    require(!schemes.empty(), "schemes", "needs at least one scheme");
    for (const auto& s : schemes) check_scheme("schemes", s);
    check_positive(c, "nu");
    check_positive(c, "final_time");
    check_positive(c, "steps_coefficient");
    require(c.number("steps_exponent") >= 0.0, "steps_exponent", "must be non-negative");
    check_positive(c, "first_time");
    require(c.number("first_time") <= c.number("final_time"), "first_time", "must not exceed final_time");
    require(c.count("per_decade") >= 1, "per_decade", "must be at least 1");
    require(c.count("record_every") >= 1, "record_every", "must be at least 1");
  } else if (k == "kpz-mhfe") {
    check_enum("problem", c.text("problem"), {"stromatolite", "stochastic"});
    require(c.count("m") >= 2, "m", "needs at least two elements");
    check_positive(c, "nu");
    if (c.text("problem") == "stochastic") require(c.number("chi") >= 0.0, "chi", "must be positive, or 0 for chi = dx");
    else check_positive(c, "chi");
    check_positive(c, "final_time");
    check_positive(c, "dt_over_dx");
    check_positive(c, "tol");
    require(c.count("max_iters") >= 1, "max_iters", "must be at least 1");
    check_mollifier("mollifier", c.text("mollifier"));
    check_positive(c, "kappa");
    if (c.text("problem") == "stromatolite") {
      require(c.number("lambda") == c.number("nu"), "lambda",
              "the stromatolite solution is exact only for lambda = nu");
      require(c.count("realizations") == 1, "realizations", "the stromatolite problem is deterministic; use 1");
    }
  } else if (k == "growth") {
    try {
      kpz::growth::model_from_string(c.text("model"));
    } catch (const std::exception&) {
      throw ConfigError("model", "unknown model '" + c.text("model") + "'");
    }
    const auto sizes = typed_array<std::size_t>(c.values, "sizes", "positive integers");
    require(!sizes.empty(), "sizes", "needs at least one lattice size");
    for (auto L : sizes) require(L >= 1, "sizes", "lattice sizes must be at least 1");
    check_positive(c, "t_max_coefficient");
    require(c.number("t_max_exponent") >= 0.0, "t_max_exponent", "must be non-negative");
    require(c.count("per_decade") >= 1, "per_decade", "must be at least 1");
    check_positive(c, "t_min");
    require(c.number("growth_fraction") > 0.0 && c.number("growth_fraction") < 1.0, "growth_fraction",
            "must lie in (0, 1)");
    require(c.number("saturation_factor") >= 1.0, "saturation_factor", "must be at least 1");
    if (c.flag("fit")) require(sizes.size() >= 2, "sizes", "an exponent fit needs at least two sizes");
  } else if (k == "convergence-study") {
    const auto m = typed_array<std::size_t>(c.values, "m", "positive integers");
    require(!m.empty(), "m", "needs at least one mesh");
    for (auto v : m) require(v >= 2, "m", "every mesh needs at least two elements");
    check_positive(c, "chi");
    check_positive(c, "final_time");
    check_positive(c, "dt_over_dx");
    check_positive(c, "tol");
    try {
      kpz::mhfe::error_norm_from_string(c.text("norm"));
    } catch (const std::exception&) {
      throw ConfigError("norm", "unknown norm '" + c.text("norm") + "'");
    }
  } else if (k == "renorm-compare") {
    check_renorm_common(c);
    const auto& levels = c.values.at("levels");
    require(levels.is_array() && !levels.empty(), "levels", "needs at least one {n, kappa} level");
    for (const auto& L : levels) {
      require(L.is_object() && L.contains("n") && L.contains("kappa") && L.size() == 2, "levels",
              "each level is an object {\"n\": cells, \"kappa\": scale}");
      require(L["n"].is_number_integer() && L["n"].get<long long>() >= 2, "levels.n", "needs at least two cells");
      require(L["kappa"].is_number() && L["kappa"].get<double>() > 0.0, "levels.kappa", "must be positive");
    }
  } else if (k == "renorm-ladder") {
    check_renorm_common(c);
    require(c.count("n0") >= 2, "n0", "needs at least two cells");
    const auto kappas = typed_array<double>(c.values, "kappas", "numbers");
    require(!kappas.empty(), "kappas", "needs at least one kappa");
    for (double v : kappas) require(v > 0.0, "kappas", "must be positive");
  }
}

}  // namespace

RunConfig resolve_config(const json& raw) {
  if (!raw.is_object()) throw ConfigError("config", "expected a JSON object");
  const auto kind_it = raw.find("kind");
  if (kind_it == raw.end()) throw ConfigError("kind", "missing field");
  if (!kind_it->is_string()) throw ConfigError("kind", "expected a string");
  RunConfig c{kind_it->get<std::string>(), {}};
  c.values = default_config(c.kind);
  merge(c.values, raw, "");
  validate(c);
  return c;
}

json read_config_file(const std::filesystem::path& path) {
  try {
    return json::parse(read_file(path), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", path.string() + ": " + e.what());
  }
}

}  // namespace kpzrun
