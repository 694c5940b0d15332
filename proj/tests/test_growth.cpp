#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "kpz/errors.hpp"
#include "kpz/growth.hpp"
#include "kpz/rng.hpp"

using namespace kpz;
using namespace kpz::growth;

namespace {

Lattice with(std::vector<std::int64_t> h) {
  Lattice lat(h.size());
  lat.heights = std::move(h);
  return lat;
}

// w = L^α f(t/L^z) with f(u) = u^β below 1 and 1 above.
RoughnessSeries family_vicsek(std::size_t L, double alpha, double beta, double z) {
  RoughnessSeries s;
  s.L = L;
  const double tx = std::pow(double(L), z);
  for (double t = 1.0; t <= 64.0 * tx; t *= std::pow(10.0, 0.05)) {
    s.times.push_back(t);
    s.mean_height.push_back(t);
    s.roughness.push_back(std::pow(double(L), alpha) * std::min(1.0, std::pow(t / tx, beta)));
  }
  return s;
}

}  // namespace

TEST_CASE("ballistic deposition rule") {
  auto flat = with({0, 0, 0, 0});
  deposit_bd(flat, 2);
  CHECK(flat.heights == std::vector<std::int64_t>{0, 0, 1, 0});
  auto tall = with({0, 5, 0});
  deposit_bd(tall, 0);
  CHECK(tall.heights[0] == 5);
  auto even = with({3, 3, 3});
  deposit_bd(even, 1);
  CHECK(even.heights == std::vector<std::int64_t>{3, 4, 3});
  // Periodic neighbour on the left edge.
  auto wrap = with({0, 0, 7});
  deposit_bd(wrap, 0);
  CHECK(wrap.heights[0] == 7);
}

TEST_CASE("random deposition rule") {
  auto lat = with({2, 0, 9});
  deposit_rd(lat, 1);
  CHECK(lat.heights == std::vector<std::int64_t>{2, 1, 9});
  Lattice big(50);
  noise::RngStream r(1, 0);
  for (int n = 0; n < 1000; ++n) deposit(Model::random, big, r.uniform_index(50), r);
  CHECK(big.deposited == 1000);
  CHECK(std::accumulate(big.heights.begin(), big.heights.end(), std::int64_t{0}) == 1000);
  CHECK(mean_height(big.heights) == doctest::Approx(20.0));
}

TEST_CASE("random deposition with relaxation rule") {
  noise::RngStream r(2, 0);
  int left = 0, right = 0;
  for (int n = 0; n < 400; ++n) {
    auto lat = with({0, 2, 0, 5});
    deposit_rd_relax(lat, 1, r);
    CHECK(lat.heights[1] == 2);
    left += lat.heights[0] == 1;
    right += lat.heights[2] == 1;
  }
  CHECK(left + right == 400);
  CHECK(left > 150);
  CHECK(right > 150);

  auto flat = with({4, 4, 4});
  deposit_rd_relax(flat, 1, r);
  CHECK(flat.heights == std::vector<std::int64_t>{4, 5, 4});
  auto slope = with({1, 2, 3});
  deposit_rd_relax(slope, 1, r);
  CHECK(slope.heights == std::vector<std::int64_t>{2, 2, 3});
  // Ties with the column itself keep the particle in place.
  auto tie = with({2, 2, 5});
  deposit_rd_relax(tie, 1, r);
  CHECK(tie.heights == std::vector<std::int64_t>{2, 3, 5});
}

TEST_CASE("no rule ever lowers a column") {
  noise::RngStream r(3, 0);
  for (auto model : {Model::ballistic, Model::random, Model::random_relax}) {
    Lattice lat(17);
    for (int n = 0; n < 5000; ++n) {
      const auto before = lat.heights;
      deposit(model, lat, r.uniform_index(17), r);
      for (std::size_t i = 0; i < 17; ++i) CHECK(lat.heights[i] >= before[i]);
    }
    CHECK(lat.deposited == 5000);
  }
}

TEST_CASE("roughness formula") {
  const std::vector<std::int64_t> flat{3, 3, 3}, two{1, 3}, three{0, 0, 3};
  CHECK(roughness(flat) == 0.0);
  CHECK(mean_height(two) == 2.0);
  CHECK(roughness(two) == doctest::Approx(1.0));
  CHECK(mean_height(three) == 1.0);
  CHECK(roughness(three) == doctest::Approx(std::sqrt(2.0)));
  const auto s = roughness_stats({flat, {1, 3, 2}}, {1.0, 2.0});
  CHECK(s.roughness[0] == 0.0);
  CHECK(s.roughness[1] == doctest::Approx(std::sqrt(2.0 / 3.0)));
  for (double w : s.roughness) CHECK(w >= 0.0);
  CHECK_THROWS_AS(roughness_stats({}, {}), InvalidArgument);
  CHECK_THROWS_AS(roughness_stats({flat}, {1.0, 2.0}), DimensionError);
}

TEST_CASE("geometric sampling times") {
  const auto t = geometric_times(1.0, 1000.0, 10, 64);
  CHECK(t.front() == doctest::Approx(1.0));
  CHECK(t.back() == doctest::Approx(1000.0));
  CHECK(std::is_sorted(t.begin(), t.end()));
  CHECK(std::adjacent_find(t.begin(), t.end()) == t.end());
  for (double v : t) CHECK(v * 64 == doctest::Approx(std::round(v * 64)));
  CHECK_THROWS_AS(geometric_times(0.0, 10.0, 10, 4), InvalidArgument);
}

TEST_CASE("simulation is deterministic per seed") {
  const auto times = geometric_times(0.25, 1.0, 4, 4);
  const auto a = simulate(Model::ballistic, 4, times, noise::RngStream(5, 0));
  const auto b = simulate(Model::ballistic, 4, times, noise::RngStream(5, 0));
  CHECK(a.roughness == b.roughness);
  CHECK(a.mean_height == b.mean_height);
  const auto e1 = simulate_ensemble(Model::random_relax, 16, geometric_times(1, 20, 5, 16), 8, 3, 1);
  const auto e2 = simulate_ensemble(Model::random_relax, 16, geometric_times(1, 20, 5, 16), 8, 3, 4);
  CHECK(e1.series.roughness == e2.series.roughness);
}

TEST_CASE("random deposition roughness grows like the square root of time") {
  // Column heights are Binomial(tL, 1/L): E w² = t(1 − 1/L) exactly.
  const std::size_t L = 64, runs = 400;
  const std::vector<double> times{4.0, 16.0};
  const auto e = simulate_ensemble(Model::random, L, times, runs, 7, 1);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double w2 = e.series.roughness[k] * e.series.roughness[k];
    CHECK(std::abs(w2 - times[k] * (1.0 - 1.0 / L)) < 3.0 * e.w2_stderr[k]);
    CHECK(e.series.mean_height[k] == doctest::Approx(times[k]));
  }
}

TEST_CASE("relaxation smooths the interface") {
  const auto times = geometric_times(1.0, 50.0, 5, 64);
  const auto rd = simulate_ensemble(Model::random, 64, times, 50, 9, 1);
  const auto rx = simulate_ensemble(Model::random_relax, 64, times, 50, 9, 1);
  for (std::size_t k = 0; k < times.size(); ++k) CHECK(rx.series.roughness[k] <= rd.series.roughness[k]);
}

TEST_CASE("exponent fits on exact power laws") {
  SUBCASE("pure growth law") {
    RoughnessSeries s;
    for (double t = 1.0; t <= 1000.0; t *= 1.5) {
      s.times.push_back(t);
      s.mean_height.push_back(t);
      s.roughness.push_back(std::sqrt(t));
    }
    const auto g = fit_growth(s, 1.0, 1000.0);
    CHECK(std::abs(g.beta - 0.5) < 1e-6);
    CHECK_THROWS_AS(fit_growth(s, 2000.0, 3000.0), FitError);
  }
  SUBCASE("family-vicsek data recovers all three exponents") {
    std::vector<RoughnessSeries> series;
    for (std::size_t L : {16u, 32u, 64u, 128u}) series.push_back(family_vicsek(L, 0.5, 0.25, 2.0));
    const auto f = fit_exponents(series);
    CHECK(f.alpha == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(f.beta == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(f.z == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(f.closure_gap() < 1e-6);
    for (std::size_t k = 0; k < f.sizes.size(); ++k)
      CHECK(f.saturation[k] == doctest::Approx(std::sqrt(double(f.sizes[k]))));
  }
  SUBCASE("degenerate input") {
    CHECK_THROWS_AS(fit_exponents({family_vicsek(16, 0.5, 0.25, 2.0)}), FitError);
    FitOptions bad;
    bad.growth_fraction = 0.0;
    CHECK_THROWS_AS(fit_exponents({family_vicsek(16, 0.5, 0.25, 2.0), family_vicsek(32, 0.5, 0.25, 2.0)}, bad),
                    InvalidArgument);
  }
}

TEST_CASE("family-vicsek collapse") {
  SUBCASE("identical curves collapse exactly") {
    const auto s = family_vicsek(32, 0.5, 0.25, 2.0);
    CHECK(family_vicsek_collapse({s, s}, 0.0, 1.3).spread == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("exact scaling data collapses up to interpolation") {
    std::vector<RoughnessSeries> series;
    for (std::size_t L : {16u, 32u, 64u}) series.push_back(family_vicsek(L, 0.5, 0.25, 2.0));
    const double good = family_vicsek_collapse(series, 0.5, 2.0).spread;
    CHECK(good < 1e-3);
    CHECK(family_vicsek_collapse(series, 0.8, 2.3).spread > 10.0 * good);
  }
  SUBCASE("ballistic data collapses best near the fitted exponents") {
    std::vector<RoughnessSeries> series;
    for (std::size_t L : {64u, 128u, 256u}) {
      const auto times = geometric_times(1.0, 2.0 * std::pow(double(L), 1.5), 10, L);
      series.push_back(simulate_ensemble(Model::ballistic, L, times, 20, 11, 1).series);
    }
    const auto f = fit_exponents(series);
    const double fitted = family_vicsek_collapse(series, f.alpha, f.z).spread;
    CHECK(fitted < family_vicsek_collapse(series, f.alpha + 0.3, f.z + 0.3).spread);
  }
  SUBCASE("non-overlapping ranges") {
    auto a = family_vicsek(16, 0.5, 0.25, 2.0), b = family_vicsek(16, 0.5, 0.25, 2.0);
    b.L = 1u << 20;
    CHECK_THROWS_AS(family_vicsek_collapse({a, b}, 0.5, 2.0), FitError);
  }
}

TEST_CASE("model names") {
  for (auto m : {Model::ballistic, Model::random, Model::random_relax}) CHECK(model_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(model_from_string("eden"), InvalidArgument);
}
