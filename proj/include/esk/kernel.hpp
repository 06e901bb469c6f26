#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <unordered_map>

#include "esk/error.hpp"
#include "esk/hash.hpp"
#include "esk/types.hpp"

namespace esk {

// k-th partial sum of the incremental order-statistic recursion:
// the k-th smallest of m i.i.d. exponentials equals the (k-1)-th smallest
// plus an independent exponential divided by (m - k + 1).
[[nodiscard]] inline double next_order_stat(double prev_sum, double exp_value, std::uint32_t k,
                                            std::uint32_t m) {
  if (k < 1 || k > m) {
    throw index_error("next_order_stat: position index out of range");
  }
  return prev_sum + exp_value / static_cast<double>(m - k + 1);
}

// Sparse Fisher-Yates shuffle of {1..m}, settled one position at a time.
// Only displaced entries are materialized, so an update that terminates after
// a few steps pays for those steps only. Re-seeding with the same seed
// reproduces the same prefix.
class lazy_permutation {
public:
  lazy_permutation(std::uint32_t m, std::uint64_t seed) : m_(m), seed_(seed) {
    if (m == 0) {
      throw invalid_config_error("lazy_permutation: m must be at least 1");
    }
  }

  // Settle position k (positions must be consumed in order 1,2,...,m).
  // Returns a value from {1..m} not returned before.
  [[nodiscard]] std::uint32_t take(std::uint32_t k) {
    if (k != cursor_ + 1 || k > m_) {
      throw contract_error("lazy_permutation: positions must be consumed in order");
    }
    const std::uint64_t span = m_ - k + 1;
    const std::uint32_t r =
        k + static_cast<std::uint32_t>(counter_draw(seed_, counter_++) % span);
    const std::uint32_t at_k = get(k);
    const std::uint32_t at_r = get(r);
    displaced_[r] = at_k;
    displaced_[k] = at_r;
    cursor_ = k;
    return at_r;
  }

  [[nodiscard]] std::uint32_t cursor() const noexcept { return cursor_; }

private:
  [[nodiscard]] std::uint32_t get(std::uint32_t idx) const {
    const auto it = displaced_.find(idx);
    return it == displaced_.end() ? idx : it->second;
  }

  std::uint32_t m_;
  std::uint32_t cursor_ = 0;
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::unordered_map<std::uint32_t, std::uint32_t> displaced_;
};

struct kernel_result {
  bool touched = false;      // any cell written
  std::uint32_t steps = 0;   // order statistics generated before stopping
};

// Shared update kernel: streams the order statistics of m Exp(rate) variates
// derived from (salt, edge identity) into the cell arrays, stopping as soon
// as the running sum reaches the current maximum (a >= comparison: an equal
// value can never improve a cell). Positions are assigned by the per-edge
// shuffle, consumed only after the stop check. The result is bit-identical
// to running the same procedure without the early stop.
inline kernel_result kernel_update(std::span<double> s, std::span<edge_key> f, double& max_cache,
                                   const edge_key& id, double rate, std::uint64_t salt) {
  if (!(rate > 0.0)) {
    throw invalid_weight_error("kernel_update: edge weight must be positive");
  }
  const auto m = static_cast<std::uint32_t>(s.size());
  lazy_permutation perm(m, perm_seed(salt, id.lo, id.hi, id.tag));
  kernel_result res;
  double sum = 0.0;
  bool update_max = false;
  for (std::uint32_t k = 1; k <= m; ++k) {
    const double u = hash_unit(salt, hash_seed{id.lo, id.hi, id.tag, k});
    sum = next_order_stat(sum, exp_draw(u, rate), k, m);
    ++res.steps;
    if (sum >= max_cache) {
      break;
    }
    const std::uint32_t cell = perm.take(k) - 1;
    if (sum < s[cell]) {
      if (s[cell] == max_cache) {
        update_max = true;
      }
      s[cell] = sum;
      f[cell] = id;
      res.touched = true;
    }
  }
  if (update_max) {
    max_cache = *std::max_element(s.begin(), s.end());
  }
  return res;
}

}  // namespace esk
