#include "kpz/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "kpz/basis.hpp"
#include "kpz/errors.hpp"

namespace kpz {
namespace {
// FFTW planning is not thread safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct TrigTransform::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Plans(std::size_t m) {
    const int n = static_cast<int>(m);
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(m);
    spec = fftw_alloc_complex(m / 2 + 1);
    if (!real || !spec) {
      release();
      throw NumericError("TrigTransform: FFTW allocation failed");
    }
    forward = fftw_plan_dft_r2c_1d(n, real, spec, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(n, spec, real, FFTW_ESTIMATE);
    if (!forward || !backward) {
      release();
      throw NumericError("TrigTransform: FFTW planning failed");
    }
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    release();
  }
  void release() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (real) fftw_free(real);
    if (spec) fftw_free(spec);
    forward = backward = nullptr;
    real = nullptr;
    spec = nullptr;
  }
};

TrigTransform::TrigTransform(std::size_t modes, std::size_t points) : modes_(modes), points_(points) {
  if (modes == 0) throw InvalidArgument("TrigTransform: need at least one mode");
  if (points <= 2 * static_cast<std::size_t>(TrigBasis::wavenumber(modes - 1)))
    throw InvalidArgument("TrigTransform: grid too coarse for the highest wavenumber");
  plans_ = std::make_unique<Plans>(points);
}

TrigTransform::~TrigTransform() = default;
TrigTransform::TrigTransform(TrigTransform&&) noexcept = default;
TrigTransform& TrigTransform::operator=(TrigTransform&&) noexcept = default;
TrigTransform::TrigTransform(const TrigTransform& other) : TrigTransform(other.modes_, other.points_) {}
TrigTransform& TrigTransform::operator=(const TrigTransform& other) {
  if (this != &other) *this = TrigTransform(other.modes_, other.points_);
  return *this;
}

void TrigTransform::synthesize(std::span<const double> coeffs, std::span<double> values) {
  if (coeffs.size() > modes_ || values.size() != points_)
    throw DimensionError("TrigTransform::synthesize: shape mismatch");
  constexpr double r = std::numbers::sqrt2 / 2.0;
  fftw_complex* s = plans_->spec;
  for (std::size_t k = 0; k <= points_ / 2; ++k) s[k][0] = s[k][1] = 0.0;
  if (!coeffs.empty()) s[0][0] = coeffs[0];
  for (std::size_t j = 1; j < coeffs.size(); ++j) {
    const auto k = static_cast<std::size_t>(TrigBasis::wavenumber(j));
    if (j % 2 == 1)
      s[k][0] = r * coeffs[j];
    else
      s[k][1] = -r * coeffs[j];
  }
  fftw_execute_dft_c2r(plans_->backward, s, plans_->real);
  for (std::size_t i = 0; i < points_; ++i) values[i] = plans_->real[i];
}

void TrigTransform::analyze(std::span<const double> values, std::span<double> coeffs) {
  if (coeffs.size() > modes_ || values.size() != points_)
    throw DimensionError("TrigTransform::analyze: shape mismatch");
  for (std::size_t i = 0; i < points_; ++i) plans_->real[i] = values[i];
  fftw_execute_dft_r2c(plans_->forward, plans_->real, plans_->spec);
  const double inv = 1.0 / static_cast<double>(points_);
  const double r = std::numbers::sqrt2 * inv;
  const fftw_complex* s = plans_->spec;
  if (!coeffs.empty()) coeffs[0] = s[0][0] * inv;
  for (std::size_t j = 1; j < coeffs.size(); ++j) {
    const auto k = static_cast<std::size_t>(TrigBasis::wavenumber(j));
    coeffs[j] = j % 2 == 1 ? r * s[k][0] : -r * s[k][1];
  }
}

}  // namespace kpz
