#include "lcrip/rng.hpp"

namespace lcrip {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53U;
constexpr std::uint32_t kMul1 = 0xCD9E8D57U;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9U;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85U;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                    std::uint32_t& hi) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream) {}

Philox4x32::Block Philox4x32::encrypt(Block ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMul0, ctr[0], lo0, hi0);
    mulhilo(kMul1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

void Philox4x32::refill() noexcept {
  const Block ctr{static_cast<std::uint32_t>(block_),
                  static_cast<std::uint32_t>(block_ >> 32),
                  static_cast<std::uint32_t>(stream_),
                  static_cast<std::uint32_t>(stream_ >> 32)};
  buffer_ = encrypt(ctr, key_);
  ++block_;
  consumed_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() noexcept {
  if (consumed_ >= 4) refill();
  const std::uint64_t lo = buffer_[consumed_];
  const std::uint64_t hi = buffer_[consumed_ + 1];
  consumed_ += 2;
  return (hi << 32) | lo;
}

RngStream RngStream::child(std::uint64_t index) const noexcept {
  const std::uint64_t mixed =
      splitmix64(splitmix64(stream_index) ^ splitmix64(~index));
  return RngStream{master_seed, mixed};
}

std::uint64_t uniform_index(Philox4x32& eng, std::uint64_t bound) noexcept {
  const std::uint64_t limit =
      Philox4x32::max() - (Philox4x32::max() % bound + 1) % bound;
  for (;;) {
    const std::uint64_t r = eng();
    if (r <= limit) return r % bound;
  }
}

}  // namespace lcrip
