#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "esk/estimators.hpp"
#include "esk/graphgen.hpp"
#include "esk/sketch.hpp"

namespace esk {

struct louvain_config {
  std::uint32_t max_levels = 20;
  std::uint32_t sweep_cap = 100;  // per level; noisy gains can oscillate
  std::uint64_t seed = 0;
};

/// Node-to-community map over original node ids, with refreshable
/// per-community caches.
struct partition {
  std::map<node_id, std::uint64_t> assignment;
  std::uint32_t level = 0;

  struct community_info {
    double volume_hat = 0.0;
    std::vector<node_id> members;
  };
  std::map<std::uint64_t, community_info> communities;

  /// Rebuild member lists and cached volume estimates from the store.
  void refresh(const sketch_store& store);

  [[nodiscard]] std::uint64_t community_count() const;
};

struct modularity_estimate {
  double value = 0.0;
  // (e-hat, vol-hat) per community in ascending label order; the value is
  // reproducible as sum(e/e_V - (vol/sum vols)^2)
  std::vector<std::pair<double, double>> per_community_terms;
  double e_v_hat = 0.0;
};

struct level_summary {
  std::uint32_t level = 0;
  std::uint32_t sweeps = 0;
  std::uint64_t moves = 0;
  std::uint64_t communities = 0;
};

struct louvain_result {
  partition part;
  modularity_estimate mod;
  std::vector<level_summary> levels;
};

/// Numerator of the estimated modularity change for moving a node (or a
/// coarsened unit) into a community. The denominator 4 e(V)^2 is a positive
/// constant and only the sign matters for move decisions.
[[nodiscard]] inline double gain_numerator(double e_v_hat, double deg_v_in_c_hat,
                                           double vol_c_hat, double deg_v_hat) {
  return 4.0 * e_v_hat * deg_v_in_c_hat - 2.0 * vol_c_hat * deg_v_hat - deg_v_hat * deg_v_hat;
}

/// Snapshot of cached gain inputs; `version` detects snapshots taken before a
/// later move invalidated the community caches.
struct gain_cache {
  double e_v_hat = 0.0;
  double vol_c_hat = 0.0;
  double deg_v_hat = 0.0;
  std::uint64_t version = 0;
};

/// Two-phase greedy optimizer over a read-only store. Exposed for tests and
/// step-by-step drivers; `louvain()` below is the plain entry point.
class louvain_engine {
public:
  louvain_engine(const sketch_store& store, louvain_config cfg);

  /// Randomized node sweeps until a sweep makes no move (or the cap hits).
  std::uint64_t run_phase1();

  /// Collapse each community into one super-node unit. False when every unit
  /// kept its own community, i.e. the level changed nothing.
  bool coarsen();

  [[nodiscard]] louvain_result run();

  [[nodiscard]] double e_v_hat() const noexcept { return e_v_; }
  [[nodiscard]] std::uint64_t cache_version() const noexcept { return version_; }
  [[nodiscard]] std::uint32_t level() const noexcept { return level_; }
  [[nodiscard]] std::uint32_t unit_count() const noexcept {
    return static_cast<std::uint32_t>(units_.size());
  }
  [[nodiscard]] std::uint32_t unit_of(node_id original) const;
  [[nodiscard]] std::uint64_t community_of(std::uint32_t unit) const;

  [[nodiscard]] gain_cache snapshot(std::uint32_t unit, std::uint64_t community) const;

  /// Gain numerator for moving `unit` into `community`, computed from the
  /// caller's snapshot; throws stale_cache_error when the snapshot predates
  /// the latest move.
  [[nodiscard]] double estimate_gain(std::uint32_t unit, std::uint64_t community,
                                     const gain_cache& cache) const;

  /// Net gain numerator of the move (target minus leaving the current
  /// community), from live caches.
  [[nodiscard]] double move_gain(std::uint32_t unit, std::uint64_t community) const;

  void apply_move(std::uint32_t unit, std::uint64_t community);

  struct move_record {
    std::uint64_t unit;
    std::uint64_t from;
    std::uint64_t to;
  };
  [[nodiscard]] const std::vector<move_record>& move_log() const noexcept { return log_; }

  [[nodiscard]] partition current_partition() const;

private:
  struct unit_state {
    const sketch* sk = nullptr;
    double w_hat = 0.0;    // degree estimate of the (merged) sketch
    double vol_hat = 0.0;  // sum of member node degree estimates
    std::vector<node_id> members;
  };

  // sampled-edge endpoints outside the unit, bucketed by community
  [[nodiscard]] std::map<std::uint64_t, std::uint32_t> candidate_counts(std::uint32_t unit) const;
  [[nodiscard]] double gain_from_counts(std::uint32_t unit, std::uint64_t community,
                                        const std::map<std::uint64_t, std::uint32_t>& counts) const;

  const sketch_store& store_;
  louvain_config cfg_;
  double e_v_ = 0.0;
  std::vector<unit_state> units_;
  std::vector<sketch> owned_;  // coarse-level merged sketches
  std::unordered_map<node_id, std::uint32_t> unit_of_;
  std::vector<std::uint64_t> comm_of_;
  std::vector<double> comm_vol_;
  std::vector<std::uint32_t> comm_size_;
  std::mt19937_64 rng_;
  std::uint64_t version_ = 0;
  std::uint32_t level_ = 0;
  std::vector<move_record> log_;
  std::vector<level_summary> levels_;
};

[[nodiscard]] louvain_result louvain(const sketch_store& store, const louvain_config& cfg = {});

/// Sketch-only modularity of a partition: per community, internal weight over
/// total weight minus squared volume fraction, every term estimated.
[[nodiscard]] modularity_estimate estimate_modularity(const sketch_store& store,
                                                      const partition& part);

struct split_half_result {
  partition part;  // found on the first half
  double estimate = 0.0;  // average of the two cross-evaluations
  modularity_estimate eval_a_on_b;
  modularity_estimate eval_b_on_a;
};

///2-fold selection-bias correction: optimize on one half of the positions,
/// evaluate on the other, swap, average. Requires even m >= 6.
[[nodiscard]] split_half_result split_half_modularity(const sketch_store& store,
                                                      const louvain_config& cfg = {});

/// Exact modularity of one partition on the full graph (desk-scale
/// verification path).
[[nodiscard]] double exact_modularity(const oracle_graph& g, const partition& part);

}  // namespace esk
