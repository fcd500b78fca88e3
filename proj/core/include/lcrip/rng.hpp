#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace lcrip {

/// Philox4x32-10 counter-based generator.
///
/// The 128-bit counter is (block index, stream index); the key is the
/// master seed. Any (seed, stream, block) triple can be evaluated in
/// isolation, so draws do not depend on which worker produced them.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Raw 10-round bijection; exposed for known-answer tests.
  static Block encrypt(Block counter, Key key) noexcept;

 private:
  void refill() noexcept;

  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int consumed_ = 4;
};

/// Addresses one independent substream of a master seed.
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  /// Deterministic child stream; children of distinct parents or with
  /// distinct indices are (up to 64-bit hash collisions) distinct streams.
  [[nodiscard]] RngStream child(std::uint64_t index) const noexcept;

  [[nodiscard]] Philox4x32 engine() const noexcept {
    return Philox4x32(master_seed, stream_index);
  }

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Distribution transforms. These are written out explicitly rather than
// using <random> distributions, whose algorithms are implementation-defined.

/// Uniform on the open interval (0, 1).
inline double uniform_open01(Philox4x32& eng) noexcept {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_normal(Philox4x32& eng) noexcept {
  const double u1 = uniform_open01(eng);
  const double u2 = uniform_open01(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline double standard_exponential(Philox4x32& eng) noexcept {
  return -std::log(uniform_open01(eng));
}

/// Symmetric exponential with unit variance: density exp(-sqrt2 |t|) / sqrt2,
/// so P(|E| >= s) = exp(-sqrt2 s).
inline double unit_laplace(Philox4x32& eng) noexcept {
  const std::uint64_t bits = eng();
  const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  const double magnitude = -std::log(u) * M_SQRT1_2;
  return (bits & 1U) ? -magnitude : magnitude;
}

/// Uniform integer in [0, bound) by rejection; bound > 0.
std::uint64_t uniform_index(Philox4x32& eng, std::uint64_t bound) noexcept;

}  // namespace lcrip
