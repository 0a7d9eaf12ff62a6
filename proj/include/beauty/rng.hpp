#pragma once

#include <cstdint>

namespace beauty {

/*
 * SplitMix64 (Vigna's fixed-increment variant of Steele/Lea/Flood's
 * splittable generator): one 64-bit word of state, advanced by the golden
 * gamma and scrambled through the murmur-style finalizer below.
 *
 * Substreams are addressed, not split: stream i of master seed s starts at
 * state mix64(s + (i + 1) * gamma). Any trial can therefore be generated on
 * any thread, in any order, with bit-identical output. This construction is
 * part of the reproducibility contract and must not change.
 */

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
public:
  explicit constexpr SplitMix64(std::uint64_t state) : state_(state) {}

  constexpr std::uint64_t next() {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  // Uniform double in [0, 1), 53 random bits.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound), unbiased (Lemire's multiply-reject).
  std::uint64_t next_below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

private:
  std::uint64_t state_;
};

inline SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(mix64(seed + (stream + 1) * kGoldenGamma));
}

} // namespace beauty
