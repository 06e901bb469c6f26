#pragma once

#include <compare>
#include <cstdint>

namespace esk {

// Node identifiers are positive; 0 is reserved for the empty-edge sentinel.
using node_id = std::uint64_t;

// Canonical identity of a stream edge: endpoints ordered lo <= hi plus a tag
// (0 for simple edges, >0 distinguishes parallel edges). (0,0,0) means
// "no edge sampled yet".
struct edge_key {
  node_id lo = 0;
  node_id hi = 0;
  std::uint64_t tag = 0;

  [[nodiscard]] static edge_key canonical(node_id u, node_id v, std::uint64_t tag = 0) noexcept {
    return u <= v ? edge_key{u, v, tag} : edge_key{v, u, tag};
  }

  [[nodiscard]] bool is_sentinel() const noexcept { return lo == 0 && hi == 0 && tag == 0; }

  // endpoint opposite to v; for self-loops this is v itself
  [[nodiscard]] node_id other(node_id v) const noexcept { return lo == v ? hi : lo; }

  friend bool operator==(const edge_key&, const edge_key&) = default;
  auto operator<=>(const edge_key&) const = default;
};

struct weighted_edge {
  node_id u = 0;
  node_id v = 0;
  double weight = 0.0;
  std::uint64_t tag = 0;
};

enum class stream_mode : std::uint8_t { undirected = 0, directed = 1 };

}  // namespace esk
