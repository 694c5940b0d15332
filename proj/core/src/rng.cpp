#include "kpz/rng.hpp"

#include <cmath>
#include <numbers>

namespace kpz::noise {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Stafford's mix13 finalizer (as used by SplitMix64).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(mix64(seed + kGolden) ^ mix64(stream * kGolden + 0x632be59bd9b4e019ULL));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), key_(derive_key(seed, stream_id)) {}

std::uint64_t RngStream::bits_at(std::uint64_t position) const noexcept {
  // Two rounds keep adjacent counters and adjacent keys decorrelated.
  return mix64(mix64(key_ ^ (position * kGolden)) + key_);
}

double RngStream::uniform_at(std::uint64_t position) const noexcept {
  // 53 random mantissa bits, shifted off zero.
  return (static_cast<double>(bits_at(position) >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::gaussian_at(std::uint64_t position) const noexcept {
  const double u1 = uniform_at(2 * position);
  const double u2 = uniform_at(2 * position + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RngStream RngStream::substream(std::uint64_t id) const noexcept {
  return RngStream(key_, mix64(stream_id_ ^ mix64(id + kGolden)));
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) noexcept {
  // Lemire's nearly-divisionless bounded draw.
  __uint128_t m = static_cast<__uint128_t>((*this)()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<__uint128_t>((*this)()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace kpz::noise
