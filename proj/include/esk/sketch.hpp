#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "esk/error.hpp"
#include "esk/types.hpp"

namespace esk {

/// Per-node summary: an array of exponential minima (values) paired with a
/// coordinated sample of incident edges, plus the cached maximum value.
/// Cells hold +inf / the sentinel key until the node's first edge; after the
/// first edge every cell is finite.
class sketch {
public:
  explicit sketch(std::uint32_t m);

  // adopt raw arrays (deserialization); validates pairing invariants
  sketch(std::vector<double> values, std::vector<edge_key> samples);

  [[nodiscard]] std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(s_.size()); }
  [[nodiscard]] std::span<const double> values() const noexcept { return s_; }
  [[nodiscard]] std::span<const edge_key> samples() const noexcept { return f_; }
  [[nodiscard]] double max_value() const noexcept { return max_; }
  [[nodiscard]] bool empty() const noexcept {
    return max_ == std::numeric_limits<double>::infinity() && s_[0] == max_;
  }

  /// Apply one weighted edge through the shared update kernel.
  /// Returns true when any cell changed.
  bool update(const edge_key& id, double rate, std::uint64_t salt);

  /// Position-wise minimum of two coordinated sketches; the sample entry
  /// follows the smaller value (the second argument on value ties).
  [[nodiscard]] static sketch merge(const sketch& a, const sketch& b);

  /// Restrict to positions [begin, end); the slice acts as a size
  /// (end - begin) sketch for every estimator.
  [[nodiscard]] sketch slice(std::uint32_t begin, std::uint32_t end) const;

  [[nodiscard]] bool check_invariants() const noexcept;

  friend bool operator==(const sketch&, const sketch&) = default;

private:
  std::vector<double> s_;
  std::vector<edge_key> f_;
  double max_ = std::numeric_limits<double>::infinity();
};

struct ingest_report {
  std::uint64_t edges_seen = 0;
  std::uint64_t nodes_created = 0;
};

/// The full graph summary: one sketch per node observed in the stream, all
/// sharing the sketch size m, the hash salt and the stream mode.
class sketch_store {
public:
  sketch_store(std::uint32_t m, std::uint64_t salt, stream_mode mode, bool parallel_edges = false);

  void ingest(const weighted_edge& e);

  template <typename Range>
  ingest_report ingest_stream(const Range& edges) {
    ingest_report rep;
    const std::uint64_t before = sketches_.size();
    for (const auto& e : edges) {
      try {
        ingest(e);
      } catch (const error& err) {
        throw parse_error("stream position " + std::to_string(rep.edges_seen + 1) + ": " +
                          err.what());
      }
      ++rep.edges_seen;
    }
    rep.nodes_created = sketches_.size() - before;
    return rep;
  }

  [[nodiscard]] std::uint32_t m() const noexcept { return m_; }
  [[nodiscard]] std::uint64_t salt() const noexcept { return salt_; }
  [[nodiscard]] stream_mode mode() const noexcept { return mode_; }
  [[nodiscard]] bool parallel_edges() const noexcept { return parallel_; }
  [[nodiscard]] bool has_self_loops() const noexcept { return has_self_loops_; }
  [[nodiscard]] std::uint64_t node_count() const noexcept { return sketches_.size(); }

  [[nodiscard]] const sketch* find(node_id id) const;
  [[nodiscard]] const sketch& at(node_id id) const;
  [[nodiscard]] const std::map<node_id, sketch>& sketches() const noexcept { return sketches_; }

  /// Node-wise merge; nodes present in only one store are copied verbatim.
  [[nodiscard]] static sketch_store merge(const sketch_store& a, const sketch_store& b);

  /// Store whose sketches are the [begin, end) position slices.
  [[nodiscard]] sketch_store slice_positions(std::uint32_t begin, std::uint32_t end) const;

  // used by deserialization
  void adopt(node_id id, sketch sk);
  void set_self_loops(bool v) noexcept { has_self_loops_ = v; }

private:
  std::uint32_t m_;
  std::uint64_t salt_;
  stream_mode mode_;
  bool parallel_;
  bool has_self_loops_ = false;
  std::map<node_id, sketch> sketches_;
  std::map<std::pair<node_id, node_id>, std::uint64_t> pair_seen_;  // parallel-edge auto tags
};

}  // namespace esk
