#pragma once

#include <cmath>
#include <cstdint>

namespace levysim {

/// SplitMix64 output function (Steele, Lea, Flood). Used both as a stream
/// generator and as a key-mixing finalizer for deriving substreams.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t combine_key(std::uint64_t a, std::uint64_t b) noexcept {
  // Chain-hash: injective enough for stream separation, order-sensitive.
  return mix64(a + 0x9E3779B97F4A7C15ULL + (b << 1 | 1));
}

inline constexpr std::uint64_t derive_key(std::uint64_t a, std::uint64_t b) noexcept {
  return combine_key(combine_key(0x6C62272E07BB0142ULL, a), b);
}
inline constexpr std::uint64_t derive_key(std::uint64_t a, std::uint64_t b,
                                          std::uint64_t c) noexcept {
  return combine_key(derive_key(a, b), c);
}
inline constexpr std::uint64_t derive_key(std::uint64_t a, std::uint64_t b,
                                          std::uint64_t c, std::uint64_t d) noexcept {
  return combine_key(derive_key(a, b, c), d);
}

/// Counter-based random stream: state advances by the golden-ratio increment,
/// outputs pass through the SplitMix64 finalizer. Every consumer owns its own
/// stream keyed by (master seed, path index, purpose, ...), which makes all
/// sampling a pure function of the key and bit-reproducible regardless of
/// thread count or evaluation order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) noexcept : state_(mix64(key ^ 0xA3C59AC2ED9B8B6FULL)) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1); safe as a log/inverse-CDF argument.
  double uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential() noexcept { return -std::log(uniform_open()); }

  /// Standard normal via Box-Muller; the pair's second value is cached.
  double normal() noexcept {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(2.0 * exponential());
    const double a = 6.283185307179586476925286766559 * uniform();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Purpose tags for substream derivation. Values are arbitrary but frozen:
// changing them changes every sampled path.
namespace stream_tag {
inline constexpr std::uint64_t jumps = 0x4A554D50;        // per (path, shell)
inline constexpr std::uint64_t bridge = 0x42524447;       // per (path, node)
inline constexpr std::uint64_t stable_cell = 0x53544243;  // per (path, base cell)
inline constexpr std::uint64_t probe = 0x50524F42;        // per resolution
inline constexpr std::uint64_t validate = 0x56414C44;
}  // namespace stream_tag

}  // namespace levysim
