#include "kpz/growth.hpp"

#include <algorithm>
#include <cmath>

#include "kpz/errors.hpp"
#include "kpz/parallel.hpp"
#include "kpz/stats.hpp"

namespace kpz::growth {

const char* to_string(Model m) noexcept {
  switch (m) {
    case Model::ballistic: return "bd";
    case Model::random: return "rd";
    case Model::random_relax: return "rd-relax";
  }
  return "?";
}

Model model_from_string(const std::string& name) {
  if (name == "bd" || name == "ballistic") return Model::ballistic;
  if (name == "rd" || name == "random") return Model::random;
  if (name == "rd-relax" || name == "random-relax") return Model::random_relax;
  throw InvalidArgument("unknown growth model '" + name + "'");
}

Lattice::Lattice(std::size_t L) : heights(L, 0) {
  if (L == 0) throw InvalidArgument("Lattice: size must be positive");
}

namespace {
inline std::size_t left_of(std::size_t i, std::size_t L) noexcept { return i == 0 ? L - 1 : i - 1; }
inline std::size_t right_of(std::size_t i, std::size_t L) noexcept { return i + 1 == L ? 0 : i + 1; }
}  // namespace

void deposit_bd(Lattice& lat, std::size_t i) {
  auto& h = lat.heights;
  const std::size_t L = h.size();
  h[i] = std::max({h[left_of(i, L)], h[i] + 1, h[right_of(i, L)]});
  ++lat.deposited;
}

void deposit_rd(Lattice& lat, std::size_t i) {
  ++lat.heights[i];
  ++lat.deposited;
}

void deposit_rd_relax(Lattice& lat, std::size_t i, noise::RngStream& rng) {
  auto& h = lat.heights;
  const std::size_t L = h.size();
  const std::size_t l = left_of(i, L), r = right_of(i, L);
  std::size_t target = i;
  const bool left_lower = h[l] < h[i], right_lower = h[r] < h[i];
  if (left_lower && right_lower) {
    if (h[l] < h[r]) target = l;
    else if (h[r] < h[l]) target = r;
    else target = rng.uniform_index(2) ? r : l;
  } else if (left_lower) {
    target = l;
  } else if (right_lower) {
    target = r;
  }
  ++h[target];
  ++lat.deposited;
}

void deposit(Model model, Lattice& lat, std::size_t i, noise::RngStream& rng) {
  switch (model) {
    case Model::ballistic: deposit_bd(lat, i); break;
    case Model::random: deposit_rd(lat, i); break;
    case Model::random_relax: deposit_rd_relax(lat, i, rng); break;
  }
}

double mean_height(std::span<const std::int64_t> h) {
  if (h.empty()) throw InvalidArgument("mean_height: empty lattice");
  long double s = 0;
  for (auto v : h) s += static_cast<long double>(v);
  return static_cast<double>(s / static_cast<long double>(h.size()));
}

double roughness(std::span<const std::int64_t> h) {
  const double m = mean_height(h);
  double s = 0;
  for (auto v : h) s += (static_cast<double>(v) - m) * (static_cast<double>(v) - m);
  return std::sqrt(s / static_cast<double>(h.size()));
}

RoughnessSeries roughness_stats(const std::vector<std::vector<std::int64_t>>& snapshots,
                                const std::vector<double>& times) {
  if (snapshots.empty()) throw InvalidArgument("roughness_stats: no samples");
  if (snapshots.size() != times.size()) throw DimensionError("roughness_stats: one time per snapshot");
  RoughnessSeries s;
  s.L = snapshots.front().size();
  s.times = times;
  for (const auto& h : snapshots) {
    s.mean_height.push_back(mean_height(h));
    s.roughness.push_back(roughness(h));
  }
  return s;
}

std::vector<double> geometric_times(double t_min, double t_max, std::size_t per_decade, std::size_t L) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || per_decade == 0 || L == 0)
    throw InvalidArgument("geometric_times: need 0 < t_min <= t_max, points and L positive");
  const auto Ld = static_cast<double>(L);
  const double ratio = std::pow(10.0, 1.0 / static_cast<double>(per_decade));
  std::vector<double> t;
  for (double x = t_min; x <= t_max * (1 + 1e-12); x *= ratio) {
    const double deposits = std::max(1.0, std::round(x * Ld));
    const double ti = deposits / Ld;
    if (t.empty() || ti > t.back()) t.push_back(ti);
  }
  return t;
}

RoughnessSeries simulate(Model model, std::size_t L, const std::vector<double>& times, noise::RngStream rng) {
  if (!std::is_sorted(times.begin(), times.end())) throw InvalidArgument("simulate: times must be sorted");
  Lattice lat(L);
  RoughnessSeries s;
  s.L = L;
  for (double t : times) {
    const auto target = static_cast<std::uint64_t>(std::llround(t * static_cast<double>(L)));
    while (lat.deposited < target) deposit(model, lat, rng.uniform_index(L), rng);
    s.times.push_back(t);
    s.mean_height.push_back(mean_height(lat.heights));
    s.roughness.push_back(roughness(lat.heights));
  }
  return s;
}

EnsembleSeries simulate_ensemble(Model model, std::size_t L, const std::vector<double>& times, std::size_t runs,
                                 std::uint64_t seed, unsigned workers) {
  if (runs == 0) throw InvalidArgument("simulate_ensemble: need at least one run");
  std::vector<RoughnessSeries> all(runs);
  const noise::RngStream base(seed, L);
  parallel_for(runs, workers, [&](std::size_t r) { all[r] = simulate(model, L, times, base.substream(r)); });
  EnsembleSeries e;
  e.runs = runs;
  e.series.L = L;
  e.series.times = times;
  std::vector<double> w2(runs), hbar(runs);
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (std::size_t r = 0; r < runs; ++r) {
      w2[r] = all[r].roughness[k] * all[r].roughness[k];
      hbar[r] = all[r].mean_height[k];
    }
    e.series.mean_height.push_back(stats::mean(hbar));
    e.series.roughness.push_back(std::sqrt(stats::mean(w2)));
    e.w2_stderr.push_back(runs > 1 ? stats::standard_error(w2) : 0.0);
  }
  return e;
}

}  // namespace kpz::growth
