#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "esk/estimators.hpp"
#include "esk/sketch.hpp"

namespace esk {

/// Deduplicated union of every sampled edge across all node sketches.
/// Every edge here is a real edge of the original graph.
struct sampled_graph {
  std::vector<edge_key> edges;                     // unique keys, sorted
  std::map<node_id, std::vector<node_id>> adj;     // simple-pair adjacency, sorted neighbor lists
  [[nodiscard]] bool has_pair(node_id u, node_id v) const;
  [[nodiscard]] std::uint64_t unique_pair_count() const noexcept { return pair_count_; }
  std::uint64_t pair_count_ = 0;
};

[[nodiscard]] sampled_graph sampled_edge_graph(const sketch_store& store);

/// Merged sketch of every node within `radius` hops of `center`, where hops
/// are counted on the sampled-edge graph (not the true graph).
struct neighborhood_sketch {
  node_id center = 0;
  std::uint32_t radius = 0;
  sketch sk;
  std::vector<node_id> members;  // sorted
};

[[nodiscard]] neighborhood_sketch make_neighborhood(const sketch_store& store,
                                                    const sampled_graph& sg, node_id center,
                                                    std::uint32_t radius);

/// Coordinated-sample weighted-Jaccard estimate: fraction of positions whose
/// values match bitwise. Always in {0, 1/m, ..., 1}.
[[nodiscard]] double jaccard_estimate(const sketch& a, const sketch& b);
[[nodiscard]] double jaccard_estimate(const neighborhood_sketch& a, const neighborhood_sketch& b);

struct scored_pair {
  node_id u = 0;  // u < v
  node_id v = 0;
  double score = 0.0;
  bool pinned = false;  // pair is a sampled edge, predicted with certainty
};

enum class candidate_policy : std::uint8_t {
  khop,      // pairs within max_radius hops on the sampled-edge graph
  all_pairs  // every pair of store nodes (desk scale only)
};

struct score_options {
  std::uint32_t max_radius = 4;
  double alpha = 0.2;
  candidate_policy policy = candidate_policy::khop;
  // When false the sampled edges carry no pinning credit and the score is
  // the plain similarity sum: the stripped values-only baseline.
  bool use_pinning = true;
  std::uint32_t threads = 1;
};

/// Rank node pairs by combined multi-radius similarity
/// sum_d alpha^d * J_d(u, v), with sampled pairs pinned to score 1. Pinned
/// pairs sort first, then by score descending, ties by (u, v).
[[nodiscard]] std::vector<scored_pair> score_pairs(const sketch_store& store,
                                                   const score_options& opt);

struct precision_result {
  double value = 0.0;
  bool truncated = false;  // t exceeded the scored list
};

/// Fraction of the top-t scored pairs that are true edges.
[[nodiscard]] precision_result precision_at(std::span<const scored_pair> scored,
                                            const std::vector<std::pair<node_id, node_id>>& truth,
                                            std::uint64_t t);

}  // namespace esk
