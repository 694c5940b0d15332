#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <string>

#include "config.hpp"
#include "io.hpp"
#include "kpz/errors.hpp"
#include "kpz/growth.hpp"
#include "kpz/rng.hpp"
#include "manifest.hpp"
#include "plotdata.hpp"
#include "run.hpp"

using namespace kpzrun;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "kpz_cli_tests" / name;
  fs::remove_all(dir);
  return dir;
}

std::string field_of_error(const json& raw) {
  try {
    resolve_config(raw);
  } catch (const kpz::ConfigError& e) {
    return e.field();
  }
  return "";
}

json tiny_growth() {
  return {{"kind", "growth"}, {"sizes", {4}},  {"t_max_coefficient", 1.0}, {"t_max_exponent", 0.0},
          {"realizations", 1}, {"fit", false}, {"seed", 3}};
}

}  // namespace

TEST_CASE("unknown experiment kind is a config error") {
  CHECK_THROWS_AS(default_config("diffusion-limited"), kpz::ConfigError);
  CHECK(field_of_error({{"kind", "diffusion-limited"}}) == "kind");
  CHECK(field_of_error({{"seed", 1}}) == "kind");
}

TEST_CASE("defaults resolve for every kind and are echoed in full") {
  for (const auto& kind : experiment_kinds()) {
    const auto c = resolve_config({{"kind", kind}});
    CHECK(c.kind == kind);
    CHECK(c.values == default_config(kind));
  }
}

TEST_CASE("config validation names the offending field") {
  CHECK(field_of_error({{"kind", "heat-spectral"}, {"nu", 0.0}}) == "nu");
  CHECK(field_of_error({{"kind", "heat-spectral"}, {"nu", -1.0}}) == "nu");
  CHECK(field_of_error({{"kind", "kpz-mhfe"}, {"problem", "stochastic"}, {"kappa", 0.0}}) == "kappa");
  CHECK(field_of_error({{"kind", "renorm-ladder"}, {"kappas", {1.0, -0.5}}}) == "kappas");
  CHECK(field_of_error({{"kind", "kpz-mhfe"}, {"m", 1}}) == "m");
  CHECK(field_of_error({{"kind", "convergence-study"}, {"m", {64, 1}}}) == "m");
  CHECK(field_of_error({{"kind", "growth"}, {"realizations", 0}}) == "realizations");
  CHECK(field_of_error({{"kind", "growth"}, {"colour", "red"}}) == "colour");
  CHECK(field_of_error({{"kind", "convergence-study"}, {"stromatolite", {{"C", 1.0}}}}) == "stromatolite.C");
  CHECK(field_of_error({{"kind", "growth"}, {"realizations", -3}}) == "realizations");
  CHECK(field_of_error({{"kind", "growth"}, {"model", "eden"}}) == "model");
  CHECK(field_of_error({{"kind", "heat-spectral"}, {"schemes", {"rk4"}}}) == "schemes");
  CHECK(field_of_error({{"kind", "renorm-compare"}, {"mollifiers", {"boxcar"}}}) == "mollifiers");
  CHECK(field_of_error({{"kind", "kpz-mhfe"}, {"lambda", 2.0}}) == "lambda");
}

TEST_CASE("config files accept comments") {
  const auto dir = scratch("comments");
  fs::create_directories(dir);
  OutputSink(dir).write("c.json", "// growth run\n{\n  \"kind\": \"growth\", /* tiny */ \"sizes\": [8, 16]\n}\n");
  const auto c = resolve_config(read_config_file(dir / "c.json"));
  CHECK(c.counts("sizes") == std::vector<std::size_t>{8, 16});
  CHECK_THROWS_AS(read_config_file(dir / "missing.json"), IoError);
}

TEST_CASE("example configs resolve") {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(KPZ_CONFIG_DIR)) {
    CAPTURE(e.path().string());
    CHECK_NOTHROW(resolve_config(read_config_file(e.path())));
    ++n;
  }
  CHECK(n >= 6);
}

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("growth fixture: L = 4 for one monolayer") {
  const auto dir = scratch("growth_fixture");
  execute(resolve_config(tiny_growth()), dir);
  const std::string text = read_file(dir / "roughness_L4.csv");
  CHECK(text == "t,mean_height,w,w2_stderr\n1,1.25,0.82915619758884995,0\n");

  // Same numbers straight from the core simulator on the documented stream.
  const auto s = kpz::growth::simulate(kpz::growth::Model::ballistic, 4, {1.0}, kpz::noise::RngStream(3, 4).substream(0));
  const auto t = read_csv(dir / "roughness_L4.csv");
  CHECK(t.number(0, "mean_height") == s.mean_height[0]);
  CHECK(t.number(0, "w") == s.roughness[0]);
}

TEST_CASE("manifest hashes match the written files") {
  const auto dir = scratch("manifest");
  const auto m = execute(resolve_config(tiny_growth()), dir);
  CHECK(m["kind"] == "growth");
  CHECK(m["config"] == resolve_config(tiny_growth()).values);
  CHECK(m["version"] == version());
  REQUIRE(m["seeds"].size() == 1);
  CHECK(m["seeds"][0]["seed"] == 3);
  REQUIRE(m["outputs"].size() == 1);
  for (const auto& f : m["outputs"]) {
    const auto bytes = read_file(dir / f["name"].get<std::string>());
    CHECK(f["sha256"] == sha256_hex(bytes));
    CHECK(f["bytes"] == bytes.size());
  }
  CHECK(json::parse(read_file(dir / "manifest.json"))["outputs"] == m["outputs"]);
}

TEST_CASE("replay reproduces outputs byte for byte") {
  const json raw = {{"kind", "kpz-mhfe"}, {"problem", "stochastic"}, {"m", 16},     {"kappa", 0.125},
                    {"final_time", 0.02},  {"realizations", 2},       {"seed", 5}, {"record_every", 4}};
  const auto first = scratch("replay_a"), second = scratch("replay_b");
  execute(resolve_config(raw), first);
  CHECK(replay(first / "manifest.json", second).empty());
  for (const auto& e : fs::directory_iterator(first))
    if (e.path().filename() != "manifest.json")
      CHECK(read_file(e.path()) == read_file(second / e.path().filename()));

  // A tampered hash is reported.
  auto m = json::parse(read_file(first / "manifest.json"));
  m["outputs"][0]["sha256"] = std::string(64, '0');
  OutputSink(first).write("manifest.json", m.dump());
  const auto diff = replay(first / "manifest.json", scratch("replay_c"));
  REQUIRE(diff.size() == 1);
  CHECK(diff[0].name == m["outputs"][0]["name"]);
}

TEST_CASE("results do not depend on the worker count") {
  json raw = {{"kind", "growth"}, {"sizes", {8, 16}}, {"realizations", 6}, {"fit", false}, {"seed", 2}};
  const auto a = scratch("workers_1"), b = scratch("workers_3");
  execute(resolve_config(raw), a);
  raw["workers"] = 3;
  execute(resolve_config(raw), b);
  for (const char* f : {"roughness_L8.csv", "roughness_L16.csv"}) CHECK(read_file(a / f) == read_file(b / f));
}

TEST_CASE("dumped noise replays the same realization") {
  const json raw = {{"kind", "kpz-mhfe"}, {"problem", "stochastic"}, {"m", 16},  {"kappa", 0.125},
                    {"final_time", 0.02},  {"realizations", 1},       {"seed", 9}, {"dump_noise", true}};
  const auto a = scratch("dump"), b = scratch("dump_replay");
  execute(resolve_config(raw), a);
  RunOptions opt;
  opt.replay_noise = a / "noise_0.bin";
  const auto m = execute(resolve_config(raw), b, opt);
  CHECK(read_file(a / "profiles.csv") == read_file(b / "profiles.csv"));
  CHECK(m["replay_noise"]["sha256"] == sha256_hex(read_file(a / "noise_0.bin")));

  json two = raw;
  two["realizations"] = 2;
  CHECK_THROWS_AS(execute(resolve_config(two), scratch("dump_two"), opt), kpz::ConfigError);
  opt.replay_noise = a / "absent.bin";
  CHECK_THROWS_AS(execute(resolve_config(raw), scratch("dump_absent"), opt), IoError);
}

TEST_CASE("non-converging solver raises NonConvergence and keeps a manifest") {
  json raw = {{"kind", "convergence-study"}, {"m", {16}}, {"max_iters", 1}, {"tol", 1e-14}};
  const auto dir = scratch("nonconv");
  CHECK_THROWS_AS(execute(resolve_config(raw), dir), NonConvergence);
  CHECK(fs::exists(dir / "table.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("plotdata writes annotated columns") {
  const auto dir = scratch("plot");
  execute(resolve_config(tiny_growth()), dir);
  OutputSink sink(dir);
  emit_plotdata(dir, sink);
  REQUIRE(sink.files().size() == 1);
  const auto text = read_file(dir / "plot_roughness_L4.dat");
  CHECK(text.find("# x: t (log)") != std::string::npos);
  CHECK(text.find("\n1 0.82915619758884995 1.25\n") != std::string::npos);

  const auto empty = scratch("plot_empty");
  fs::create_directories(empty);
  OutputSink none(empty);
  CHECK_THROWS_AS(emit_plotdata(empty, none), IoError);
}
