#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace kpz::noise {

/// Counter-based random stream.
///
/// Every draw is a pure function of (seed, stream_id, position), so a value can
/// be regenerated at any position without replaying the sequence before it.
/// Distinct stream ids give independent streams for Monte Carlo workers.
/// The class also models UniformRandomBitGenerator through a position cursor.
class RngStream {
public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Raw 64 random bits at an absolute position.
  std::uint64_t bits_at(std::uint64_t position) const noexcept;
  /// Uniform in the open interval (0, 1).
  double uniform_at(std::uint64_t position) const noexcept;
  /// Standard normal draw; consumes positions 2p and 2p+1 of the bit sequence.
  double gaussian_at(std::uint64_t position) const noexcept;

  /// Derived stream with an independent key, e.g. one per purpose or per run.
  RngStream substream(std::uint64_t id) const noexcept;

  // Sequential interface.
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return bits_at(cursor_++); }
  double uniform() noexcept { return uniform_at(cursor_++); }
  double gaussian() noexcept { return gaussian_at(cursor_++); }
  /// Unbiased integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) noexcept;

  std::uint64_t position() const noexcept { return cursor_; }
  void seek(std::uint64_t position) noexcept { cursor_ = position; }

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t cursor_ = 0;
};

}  // namespace kpz::noise
