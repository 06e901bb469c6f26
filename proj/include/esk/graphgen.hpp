#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "esk/error.hpp"
#include "esk/types.hpp"

namespace esk {

/// Stochastic block model: n nodes in b blocks (round-robin assignment),
/// within-block edge probability p, cross-block probability q, independent
/// per-pair coin flips, weights Exp(1) or unit.
struct sbm_config {
  std::uint64_t n = 0;
  std::uint32_t b = 1;
  double p = 0.0;
  double q = 0.0;
  bool unit_weights = false;
  std::uint64_t seed = 0;
};

/// Exact adjacency-list graph used as ground truth next to the sketches.
/// Undirected, symmetric storage, no duplicate simple edges.
class oracle_graph {
public:
  explicit oracle_graph(std::uint64_t n);

  void add_edge(node_id u, node_id v, double w);

  [[nodiscard]] std::uint64_t n() const noexcept { return n_; }
  [[nodiscard]] std::uint64_t edge_count() const noexcept { return edge_count_; }
  [[nodiscard]] std::span<const std::pair<node_id, double>> neighbors(node_id u) const;

  [[nodiscard]] double degree(node_id u) const;
  [[nodiscard]] double volume(std::span<const node_id> nodes) const;
  [[nodiscard]] double total_edge_weight() const noexcept { return total_weight_; }
  [[nodiscard]] std::uint64_t non_isolated_count() const;

  struct internal_stats {
    double e = 0.0;  // weight of edges with both endpoints inside
    double w = 0.0;  // weight of edges with at least one endpoint inside
    double p = 0.0;  // e / w (0 when w == 0)
  };
  [[nodiscard]] internal_stats internal(std::span<const node_id> nodes) const;

  // ground-truth block labels when SBM-generated (empty otherwise), 1-based
  std::vector<std::uint32_t> block_label;

private:
  std::uint64_t n_;
  std::uint64_t edge_count_ = 0;
  double total_weight_ = 0.0;
  std::vector<std::vector<std::pair<node_id, double>>> adj_;
};

struct sbm_output {
  oracle_graph graph;
  std::vector<weighted_edge> stream;  // shuffled emission order
};

[[nodiscard]] sbm_output sbm_generate(const sbm_config& cfg);

/// Closed-form expected edge count from the exact block sizes.
[[nodiscard]] double expected_sbm_edges(const sbm_config& cfg);

/// block of a node under the round-robin assignment, 1-based
[[nodiscard]] std::uint32_t sbm_block_of(node_id id, std::uint32_t b) noexcept;

/// One (user, item) rating from a bipartite stream.
struct rating {
  std::uint64_t user = 0;
  std::uint64_t item = 0;
};

/// Co-rating derivation, streaming mode: for each user emit every item pair
/// (i < j) with weight 1 and tag = user id, ready for parallel-edge ingestion.
/// Input must be grouped by user; a regrouped user is an input-order error.
[[nodiscard]] std::vector<weighted_edge> corate_tagged(std::span<const rating> grouped_by_user);

/// Co-rating derivation, aggregated mode: one edge per item pair whose weight
/// is the number of co-rating users. This is the exact reference for the
/// tagged mode.
[[nodiscard]] std::vector<weighted_edge> corate_aggregate(std::span<const rating> grouped_by_user);

}  // namespace esk
