#include "kpz/basis.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "kpz/errors.hpp"

namespace kpz {
namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TrigBasis::TrigBasis(std::size_t modes) : modes_(modes) {
  if (modes == 0) throw InvalidArgument("TrigBasis: need at least one mode");
}

double TrigBasis::eigenvalue(std::size_t mode) noexcept {
  const double k = kTwoPi * wavenumber(mode);
  return k * k;
}

double TrigBasis::value(std::size_t mode, double x) const noexcept {
  if (mode == 0) return 1.0;
  const double arg = kTwoPi * wavenumber(mode) * x;
  return std::numbers::sqrt2 * ((mode % 2 == 1) ? std::cos(arg) : std::sin(arg));
}

double TrigBasis::derivative(std::size_t mode, double x) const noexcept {
  if (mode == 0) return 0.0;
  const double k = kTwoPi * wavenumber(mode);
  const double arg = k * x;
  return std::numbers::sqrt2 * k * ((mode % 2 == 1) ? -std::sin(arg) : std::cos(arg));
}

std::vector<double> periodic_grid(std::size_t points, double offset) {
  if (points == 0) throw InvalidArgument("periodic_grid: zero points");
  std::vector<double> x(points);
  for (std::size_t i = 0; i < points; ++i) x[i] = (static_cast<double>(i) + offset) / static_cast<double>(points);
  return x;
}

BasisTable::BasisTable(const TrigBasis& basis, std::vector<double> points, bool uniform_periodic)
    : modes_(basis.size()), points_(std::move(points)), uniform_(uniform_periodic),
      table_(points_.size() * modes_) {
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = 0; j < modes_; ++j) table_[i * modes_ + j] = basis.value(j, points_[i]);
}

BasisTable BasisTable::uniform(const TrigBasis& basis, std::size_t points, double offset) {
  return BasisTable(basis, periodic_grid(points, offset), true);
}

void BasisTable::synthesize(std::span<const double> coeffs, std::span<double> values) const {
  if (coeffs.size() > modes_ || values.size() != points_.size())
    throw DimensionError("BasisTable::synthesize: shape mismatch");
  const std::size_t n = coeffs.size();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double* row = &table_[i * modes_];
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += coeffs[j] * row[j];
    values[i] = acc;
  }
}

std::vector<double> BasisTable::synthesize(std::span<const double> coeffs) const {
  std::vector<double> out(points_.size());
  synthesize(coeffs, out);
  return out;
}

void BasisTable::analyze(std::span<const double> values, std::span<double> coeffs) const {
  if (!uniform_) throw LogicError("BasisTable::analyze: grid is not uniform periodic");
  if (coeffs.size() > modes_ || values.size() != points_.size())
    throw DimensionError("BasisTable::analyze: shape mismatch");
  const std::size_t n = coeffs.size();
  for (std::size_t j = 0; j < n; ++j) coeffs[j] = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double* row = &table_[i * modes_];
    const double v = values[i];
    for (std::size_t j = 0; j < n; ++j) coeffs[j] += v * row[j];
  }
  const double inv = 1.0 / static_cast<double>(points_.size());
  for (std::size_t j = 0; j < n; ++j) coeffs[j] *= inv;
}

std::vector<double> BasisTable::analyze(std::span<const double> values) const {
  std::vector<double> out(modes_);
  analyze(values, out);
  return out;
}

std::vector<double> BasisTable::sum_of_squares() const {
  std::vector<double> s(points_.size(), 0.0);
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = 0; j < modes_; ++j) s[i] += table_[i * modes_ + j] * table_[i * modes_ + j];
  return s;
}

}  // namespace kpz
