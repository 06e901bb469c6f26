#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "esk/error.hpp"

namespace esk {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Domain tags keep the unit-uniform value stream and the position-permutation
// stream statistically independent even though both are keyed by the same salt.
inline constexpr std::uint64_t kValueDomain = 0x45534b2076616c75ULL;
inline constexpr std::uint64_t kPermDomain = 0x45534b207065726dULL;

// splitmix64 finalizer; full-avalanche bijection on 64-bit words
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Canonical seed tuple: (lo endpoint, hi endpoint, tag, position index).
// Its byte encoding is the fixed-width little-endian concatenation of the four
// words, which is injective; hashing absorbs the words in that order.
struct hash_seed {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::uint64_t tag = 0;
  std::uint64_t pos = 0;

  [[nodiscard]] std::array<std::uint8_t, 32> canonical_bytes() const noexcept {
    std::array<std::uint8_t, 32> out{};
    const std::uint64_t words[4] = {lo, hi, tag, pos};
    for (int w = 0; w < 4; ++w) {
      for (int b = 0; b < 8; ++b) {
        out[static_cast<std::size_t>(w * 8 + b)] =
            static_cast<std::uint8_t>(words[w] >> (8 * b));
      }
    }
    return out;
  }

  friend bool operator==(const hash_seed&, const hash_seed&) = default;
};

// keyed avalanche hash over the canonical word sequence; each absorption step
// is a bijection of the running state
[[nodiscard]] constexpr std::uint64_t hash64(std::uint64_t key, const hash_seed& seed) noexcept {
  std::uint64_t h = mix64(key + kGolden);
  h = mix64(h ^ seed.lo);
  h = mix64(h ^ seed.hi);
  h = mix64(h ^ seed.tag);
  h = mix64(h ^ seed.pos);
  return h;
}

// Map 64 hash bits into the open interval (0,1). Uses the top 52 bits offset
// by half a step: every output is exactly representable, the smallest is
// 2^-53 and the largest 1 - 2^-53, so log() of the result is always finite
// and negative. (Dividing by 2^64+1 would round to 1.0 for large inputs.)
[[nodiscard]] constexpr double to_unit_open(std::uint64_t h) noexcept {
  return (static_cast<double>(h >> 12) + 0.5) * 0x1.0p-52;
}

// deterministic stand-in for an i.i.d. Uniform(0,1) variable attached to seed
[[nodiscard]] constexpr double hash_unit(std::uint64_t salt, const hash_seed& seed) noexcept {
  return to_unit_open(hash64(salt ^ kValueDomain, seed));
}

// inverse-CDF transform: Exp(rate) variate from a unit uniform
[[nodiscard]] inline double exp_draw(double unit, double rate) {
  if (!(rate > 0.0)) {
    throw invalid_weight_error("exp_draw: rate must be positive");
  }
  return -std::log(unit) / rate;
}

// Seed for the per-edge position shuffle. Keyed by the salt so independent
// sketch realizations also re-randomize positions (the per-cell marginal laws
// depend on that), and domain-separated from the value stream.
[[nodiscard]] constexpr std::uint64_t perm_seed(std::uint64_t salt, std::uint64_t lo,
                                                std::uint64_t hi, std::uint64_t tag) noexcept {
  return hash64(salt ^ kPermDomain, hash_seed{lo, hi, tag, 0});
}

// counter-based generator: stateless, reproducible, cheap to fork
[[nodiscard]] constexpr std::uint64_t counter_draw(std::uint64_t seed, std::uint64_t counter) noexcept {
  return mix64(seed + (counter + 1) * kGolden);
}

}  // namespace esk
