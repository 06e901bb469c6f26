#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "esk/hash.hpp"

namespace esk {

// mt19937_64 is bit-reproducible everywhere, but the standard distributions
// are not; these helpers keep every derived draw deterministic across
// toolchains.

[[nodiscard]] inline double unit_open(std::mt19937_64& g) { return to_unit_open(g()); }

[[nodiscard]] inline double exp1(std::mt19937_64& g) { return -std::log(unit_open(g)); }

[[nodiscard]] inline std::uint64_t bounded(std::mt19937_64& g, std::uint64_t n) {
  return g() % n;  // bias ~ n / 2^64, irrelevant at any realistic n
}

template <typename T>
void shuffle_vec(std::vector<T>& v, std::mt19937_64& g) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[bounded(g, i)]);
  }
}

// domain-separated child seed
[[nodiscard]] constexpr std::uint64_t fork_seed(std::uint64_t seed, std::uint64_t domain) noexcept {
  return mix64(seed + domain * kGolden);
}

}  // namespace esk
