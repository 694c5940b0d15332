#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "kpz/basis.hpp"
#include "kpz/noise.hpp"
#include "kpz/spectral.hpp"

namespace kpz::testing {

/// One Milstein correction compared with a brute-force Itô sum of
/// ∫∫ g'(u) g(u) dW(s) dW(r) over `substeps` pieces of the same Brownian path.
struct MilsteinOracle {
  double max_gap = 0.0;           ///< max over grid nodes of |scheme − Itô sum|
  double max_gap_flipped = 0.0;   ///< same with the opposite sign of the Δt term
  double envelope = 0.0;          ///< five standard deviations of the Itô sum's own error
};

/// Multiplicative noise g(u) = λu on `modes` trigonometric modes with weights
/// √q_j (empty means 1), step dt, initial state `coeffs`.
inline MilsteinOracle milstein_oracle(std::size_t modes, double lambda, double dt, std::size_t substeps,
                                      std::vector<double> coeffs, std::vector<double> weights,
                                      std::uint64_t seed) {
  auto problem = spectral::heat_problem(modes, 1.0, lambda);
  problem.noise_weights = weights;
  const spectral::SpectralStepper stepper(problem);
  const auto& grid = stepper.grid();
  const std::size_t m = grid.points();

  const auto fine = noise::draw_gaussian_matrix(noise::RngStream(seed, 0), substeps, modes, dt / double(substeps));
  std::vector<double> dw(modes, 0.0);
  for (std::size_t k = 0; k < substeps; ++k)
    for (std::size_t j = 0; j < modes; ++j) dw[j] += fine.increments(k, j);

  const spectral::SpectralField state{coeffs};
  const auto scheme = stepper.milstein_correction(state, dw, dt);
  const auto u = grid.synthesize(coeffs);

  MilsteinOracle out;
  for (std::size_t i = 0; i < m; ++i) {
    double s2 = 0.0;
    std::vector<double> chi(modes);
    for (std::size_t j = 0; j < modes; ++j) {
      chi[j] = grid.at(i, j) * (weights.empty() ? 1.0 : weights[j]);
      s2 += chi[j] * chi[j];
    }
    // Left-point Riemann sum Σ_k (W(s_k) − W(0)) δW_k at node x_i.
    double w = 0.0, ito = 0.0;
    for (std::size_t k = 0; k < substeps; ++k) {
      double d = 0.0;
      for (std::size_t j = 0; j < modes; ++j) d += chi[j] * fine.increments(k, j);
      ito += w * d;
      w += d;
    }
    const double gg = lambda * lambda * u[i];
    const double oracle = gg * ito;
    out.max_gap = std::max(out.max_gap, std::abs(scheme[i] - oracle));
    const double flipped = 0.5 * gg * (w * w + dt * s2);
    out.max_gap_flipped = std::max(out.max_gap_flipped, std::abs(flipped - oracle));
    // Sum − ½(W² − Δt s²) = ½(Δt s² − Σ δW_k²), whose standard deviation is Δt s² /√(2K).
    out.envelope = std::max(out.envelope, 5.0 * std::abs(gg) * dt * s2 / std::sqrt(2.0 * double(substeps)));
  }
  return out;
}

}  // namespace kpz::testing
