#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kpz {

/// Real trigonometric basis on the periodic unit interval, ordered
/// {1, √2 cos 2πx, √2 sin 2πx, √2 cos 4πx, √2 sin 4πx, ...}.
/// Orthonormal in L²(0,1); mode j has wavenumber (j+1)/2.
class TrigBasis {
public:
  explicit TrigBasis(std::size_t modes);

  std::size_t size() const noexcept { return modes_; }

  static int wavenumber(std::size_t mode) noexcept { return static_cast<int>((mode + 1) / 2); }
  /// Eigenvalue of −∂²ₓ on the mode: (2πn)².
  static double eigenvalue(std::size_t mode) noexcept;

  double value(std::size_t mode, double x) const noexcept;
  double derivative(std::size_t mode, double x) const noexcept;

private:
  std::size_t modes_;
};

/// Uniform periodic grid x_i = (i + offset)/points on [0, 1).
std::vector<double> periodic_grid(std::size_t points, double offset = 0.0);

/// Basis tabulated on a fixed set of points.
///
/// synthesize() works on any point set. analyze() is the discrete L² projection
/// and is exact only on uniform periodic grids whose size exceeds twice the
/// highest wavenumber of the integrand; it is rejected on other grids.
class BasisTable {
public:
  BasisTable(const TrigBasis& basis, std::vector<double> points, bool uniform_periodic = false);

  /// Table for the uniform periodic grid with `points` nodes.
  static BasisTable uniform(const TrigBasis& basis, std::size_t points, double offset = 0.0);

  std::size_t modes() const noexcept { return modes_; }
  std::size_t points() const noexcept { return points_.size(); }
  const std::vector<double>& nodes() const noexcept { return points_; }
  bool is_uniform_periodic() const noexcept { return uniform_; }

  double at(std::size_t point, std::size_t mode) const noexcept { return table_[point * modes_ + mode]; }

  /// values[i] = Σ_j coeffs[j] χ_j(x_i); coeffs may be shorter than modes().
  void synthesize(std::span<const double> coeffs, std::span<double> values) const;
  std::vector<double> synthesize(std::span<const double> coeffs) const;

  /// coeffs[j] = (1/M) Σ_i values[i] χ_j(x_i), for j < coeffs.size().
  void analyze(std::span<const double> values, std::span<double> coeffs) const;
  std::vector<double> analyze(std::span<const double> values) const;

  /// Σ_j χ_j(x_i)² at every node.
  std::vector<double> sum_of_squares() const;

private:
  std::size_t modes_;
  std::vector<double> points_;
  bool uniform_;
  std::vector<double> table_;
};

}  // namespace kpz
