#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "esk/community.hpp"
#include "esk/sketch.hpp"

namespace esk::io {

/// Parsed text edge stream: header "#mode=directed|undirected", then one
/// edge per line as "u v w [tag]".
struct edge_stream_data {
  stream_mode mode = stream_mode::undirected;
  std::vector<weighted_edge> edges;
  bool any_tags = false;
};

[[nodiscard]] edge_stream_data read_edge_stream(const std::filesystem::path& path);
void write_edge_stream(const std::filesystem::path& path, stream_mode mode,
                       std::span<const weighted_edge> edges);

/// Binary sketch file, version 1. Little-endian throughout:
///   "ESK1" | u16 version | u8 flags | u8 reserved | u32 m | u64 salt |
///   u64 node_count | body | u64 checksum(body)
/// Body: per node (sorted by id) u64 id, m raw f64 values, m sample entries
/// of (u64 lo, u64 hi, u64 tag); the compact layout drops the tag word and
/// is only valid without parallel edges.
void write_sketch_file(const std::filesystem::path& path, const sketch_store& store,
                       bool compact = false);
[[nodiscard]] sketch_store read_sketch_file(const std::filesystem::path& path);

/// Exact body size in bytes for a given layout.
[[nodiscard]] std::uint64_t sketch_body_size(std::uint64_t node_count, std::uint32_t m,
                                             bool compact) noexcept;

void write_partition_file(const std::filesystem::path& path, const partition& part,
                          double modularity_value);

struct partition_file_data {
  partition part;
  double modularity_value = 0.0;
};
[[nodiscard]] partition_file_data read_partition_file(const std::filesystem::path& path);

/// Build a store from a parsed stream. With shards > 1 the edges are split
/// round-robin, the shard stores are built concurrently and tree-merged;
/// the result is bit-identical for every shard count. In parallel-edge mode
/// untagged edges are tagged by global stream order before sharding.
[[nodiscard]] sketch_store build_store(const edge_stream_data& stream, std::uint32_t m,
                                       std::uint64_t salt, bool parallel_edges,
                                       std::uint32_t shards = 1);

[[nodiscard]] std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept;

}  // namespace esk::io
