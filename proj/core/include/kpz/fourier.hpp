#pragma once

#include <cstddef>
#include <memory>
#include <span>

namespace kpz {

/// Fast transform between TrigBasis coefficients and samples on the uniform
/// grid x_i = i/M. Same results as BasisTable::uniform(basis, M) synthesize and
/// analyze, in O(M log M). Requires M > 2·(highest wavenumber).
class TrigTransform {
public:
  TrigTransform(std::size_t modes, std::size_t points);
  ~TrigTransform();
  TrigTransform(TrigTransform&&) noexcept;
  TrigTransform& operator=(TrigTransform&&) noexcept;
  TrigTransform(const TrigTransform& other);
  TrigTransform& operator=(const TrigTransform& other);

  std::size_t modes() const noexcept { return modes_; }
  std::size_t points() const noexcept { return points_; }

  /// values[i] = Σ_j coeffs[j] χ_j(x_i); coeffs may be shorter than modes().
  void synthesize(std::span<const double> coeffs, std::span<double> values);
  /// coeffs[j] = (1/M) Σ_i values[i] χ_j(x_i).
  void analyze(std::span<const double> values, std::span<double> coeffs);

private:
  struct Plans;
  std::size_t modes_;
  std::size_t points_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace kpz
