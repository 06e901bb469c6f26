#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "esk/sketch.hpp"

namespace esk {

/// Estimator output: the point value, a closed-form relative standard-error
/// bound, and the number of matching positions that backed the estimate
/// (m for plain estimators, m' for set expressions).
struct estimate {
  double value = 0.0;
  double std_error_bound = 0.0;
  std::uint32_t m_effective = 0;
  std::string warning;  // non-empty when a documented caveat applies
};

/// Weighted degree of the node behind the sketch: (m-1) / sum of values.
/// Relative standard error 1/sqrt(m-2).
[[nodiscard]] estimate estimate_degree(const sketch& sk);

/// Sum of member degree estimates. Undirected stores only.
[[nodiscard]] estimate estimate_volume(const sketch_store& store, std::span<const node_id> nodes);
[[nodiscard]] estimate estimate_volume(const sketch_store& store);  // every node

/// Total edge weight: vol(V)/2. Requires an undirected store without
/// self-loops.
[[nodiscard]] estimate estimate_edge_count(const sketch_store& store);

/// vol(V) / (n(n-1)) for a caller-supplied node universe size n >= 2
/// (the store only knows non-isolated nodes).
[[nodiscard]] estimate estimate_density(const sketch_store& store, std::uint64_t universe);

/// Full-DNF set expression over node / super-node sketches. Conjuncts must be
/// pairwise disjoint (guaranteed by full DNF) and every conjunct needs at
/// least one positive literal.
struct set_expression {
  struct conjunct {
    std::vector<const sketch*> positives;
    std::vector<const sketch*> negatives;
  };
  std::vector<conjunct> conjuncts;

  [[nodiscard]] static set_expression intersect(std::vector<const sketch*> sketches);
  /// a minus b == a AND NOT b
  [[nodiscard]] static set_expression difference(const sketch& a, const sketch& b);
  /// full DNF of a OR b: (ab) + (a not-b) + (not-a b)
  [[nodiscard]] static set_expression union_of(const sketch& a, const sketch& b);
};

/// Weighted cardinality of the expressed edge set: count positions whose
/// positive values all match exactly and lie strictly below every negative,
/// then scale the union estimate by the match fraction. Value equality is
/// exact bitwise comparison; coordinated sketches make shared edges
/// bit-identical, and independent draws never collide.
[[nodiscard]] estimate estimate_set_expression(const set_expression& expr);

/// First position where b's value exceeds a's, disproving "edges(a) is a
/// subset of edges(b)"; nullopt when no witness exists (always, if the
/// subset relation truly holds).
[[nodiscard]] std::optional<std::uint32_t> subset_witness(const sketch& a, const sketch& b);

/// Merged sketch of a node set: represents the union of the members'
/// incident edge sets.
struct super_node_sketch {
  sketch sk;
  std::unordered_set<node_id> members;

  [[nodiscard]] bool contains(node_id v) const { return members.count(v) != 0; }
};

[[nodiscard]] super_node_sketch super_node(const sketch_store& store,
                                           std::span<const node_id> nodes);

/// Fraction of sampled edges with both endpoints inside the member set;
/// estimates p(C) = e(C)/w(C).
[[nodiscard]] estimate internal_fraction(const super_node_sketch& snk);

/// Internal edge weight e(C) = w-hat(C) * p-hat(C). The two factors are
/// independent, so the product stays unbiased. Pass self_loops_present for
/// the documented warning on stores with loops.
[[nodiscard]] estimate internal_weight(const super_node_sketch& snk,
                                       bool self_loops_present = false);

/// Weight of edges from v into the node set C, estimated from v's edge
/// sample: deg-hat(v) times the fraction of cells whose other endpoint is
/// in C.
[[nodiscard]] estimate degree_in_community(const sketch_store& store, node_id v,
                                           const std::unordered_set<node_id>& community);

/// One random-walk step: uniformly picks a sampled incident edge and returns
/// the other endpoint (v itself for self-loops). Walk randomness is the
/// caller's generator, independent of the sketch hashing.
[[nodiscard]] node_id random_neighbor(const sketch& sk, node_id v, std::mt19937_64& rng);

}  // namespace esk
