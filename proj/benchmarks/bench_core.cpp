#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "kpz/growth.hpp"
#include "kpz/mhfe.hpp"
#include "kpz/noise.hpp"
#include "kpz/renorm.hpp"
#include "kpz/rng.hpp"
#include "kpz/spectral.hpp"

using namespace kpz;

static void BM_GaussianMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const noise::RngStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(noise::draw_gaussian_matrix(rng, n, n, 1.0 / double(n)));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_GaussianMatrix)->Arg(64)->Arg(256);

static void BM_SpectralStep(benchmark::State& state) {
  const auto J = static_cast<std::size_t>(state.range(0));
  spectral::SpectralStepper stepper(spectral::heat_problem(J, 1.0, 1.0));
  auto u = spectral::SpectralField::constant(J, 1.0);
  noise::RngStream rng(2, 0);
  std::vector<double> dw(J);
  const double dt = 1e-4;
  for (auto _ : state) {
    for (auto& w : dw) w = 0.01 * rng.gaussian();
    stepper.step(spectral::Scheme::milstein, u, dw, dt);
  }
}
BENCHMARK(BM_SpectralStep)->Arg(32)->Arg(128)->Arg(512);

static void BM_MhfeStep(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const mhfe::Mesh1D mesh(0.0, 1.0, m);
  mhfe::KpzParameters p;
  p.nu = 0.5;
  p.lambda = 1.0;
  p.chi1 = p.chi2 = mesh.dx();
  p.dt = mesh.dx() / 16.0;
  const mhfe::Solver solver(mesh, p, mhfe::Boundary::periodic());
  std::vector<double> h0(m);
  for (std::size_t j = 0; j < m; ++j) h0[j] = 0.1 * std::sin(6.283185307179586 * mesh.center(j));
  const auto initial = mhfe::initial_states(mesh, h0, p, mhfe::Boundary::periodic());
  const std::vector<double> xi(mesh.nodes().size(), 0.0);
  for (auto _ : state) {
    auto states = initial;
    benchmark::DoNotOptimize(solver.step(states, xi, 0.0, 0.0));
  }
}
BENCHMARK(BM_MhfeStep)->Arg(64)->Arg(256);

static void BM_BallisticMonolayer(benchmark::State& state) {
  const auto L = static_cast<std::size_t>(state.range(0));
  growth::Lattice lat(L);
  noise::RngStream rng(3, L);
  for (auto _ : state)
    for (std::size_t k = 0; k < L; ++k) growth::deposit(growth::Model::ballistic, lat, rng() % L, rng);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BallisticMonolayer)->Arg(256)->Arg(4096);

static void BM_RenormConstants(benchmark::State& state) {
  const noise::Mollifier phi(noise::MollifierKind::bump, 0.125);
  for (auto _ : state) benchmark::DoNotOptimize(renorm::renorm_constants(phi));
}
BENCHMARK(BM_RenormConstants);
BENCHMARK_MAIN();
