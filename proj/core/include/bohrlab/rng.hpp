#pragma once

#include <cstdint>

namespace bohrlab {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Per-trial seed derived from a master seed.
///
/// seed_stream(m, i) = mix64(mix64(m ^ kSeedStreamKey) + i * kGoldenGamma).
/// For a fixed master seed the map i -> seed is injective over all 2^64
/// indices: the affine step is a bijection (odd multiplier) and so is mix64.
std::uint64_t seed_stream(std::uint64_t master_seed, std::uint64_t trial_index) noexcept;

inline constexpr std::uint64_t kSeedStreamKey = 0xB04D1AB5EED5EEDULL;

/// Counter-based generator for one integer site n under one sample seed.
///
/// The stream for (seed, n) never depends on other sites, so draws at n are
/// identical whatever horizon the caller samples up to.
class SiteRng {
 public:
  SiteRng(std::uint64_t seed, std::uint64_t site) noexcept
      : state_(mix64(seed ^ 0x5A17E5A17E5A17E5ULL) ^ mix64(site * kGoldenGamma + 0x632BE59BD9B4E019ULL)) {}

  std::uint64_t next() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace bohrlab
