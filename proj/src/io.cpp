#include "esk/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace esk::io {

namespace {

constexpr char kMagic[4] = {'E', 'S', 'K', '1'};
constexpr std::uint16_t kVersion = 1;

constexpr std::uint8_t kFlagDirected = 0x01;
constexpr std::uint8_t kFlagParallel = 0x02;
constexpr std::uint8_t kFlagSelfLoops = 0x04;
constexpr std::uint8_t kFlagCompact = 0x08;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class reader {
public:
  reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  std::uint16_t u16() { return static_cast<std::uint16_t>(u(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(u(4)); }
  std::uint64_t u64() { return u(8); }
  std::uint8_t u8() { return static_cast<std::uint8_t>(u(1)); }
  double f64() { return std::bit_cast<double>(u(8)); }
  [[nodiscard]] std::size_t pos() const { return pos_; }
  [[nodiscard]] std::size_t remaining() const { return size_ - pos_; }

private:
  std::uint64_t u(int bytes) {
    if (pos_ + static_cast<std::size_t>(bytes) > size_) {
      throw corrupt_file_error("sketch file truncated");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
      v |= static_cast<std::uint64_t>(data_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }

  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

edge_stream_data read_edge_stream(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw parse_error("cannot open edge stream file: " + path.string());
  }
  edge_stream_data data;
  std::string line;
  std::uint64_t line_no = 0;

  auto fail = [&](const std::string& why) {
    throw parse_error(path.string() + ":" + std::to_string(line_no) + ": " + why);
  };

  if (!std::getline(in, line)) {
    line_no = 1;
    fail("missing #mode header");
  }
  ++line_no;
  if (line == "#mode=undirected") {
    data.mode = stream_mode::undirected;
  } else if (line == "#mode=directed") {
    data.mode = stream_mode::directed;
  } else {
    fail("first line must be '#mode=directed' or '#mode=undirected'");
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.eof()) {
      break;
    }
    std::istringstream ls(line);
    std::uint64_t u = 0;
    std::uint64_t v = 0;
    double w = 0.0;
    if (!(ls >> u >> v >> w)) {
      fail("expected 'u v w [tag]'");
    }
    std::uint64_t tag = 0;
    if (!(ls >> tag)) {
      tag = 0;
      ls.clear();
    } else {
      data.any_tags = true;
    }
    std::string trailing;
    if (ls >> trailing) {
      fail("trailing tokens after edge fields");
    }
    if (u == 0 || v == 0) {
      fail("node ids must be positive");
    }
    if (!(w > 0.0)) {
      fail("weight must be positive");
    }
    data.edges.push_back({u, v, w, tag});
  }
  return data;
}

void write_edge_stream(const std::filesystem::path& path, stream_mode mode,
                       std::span<const weighted_edge> edges) {
  std::ofstream out(path);
  if (!out) {
    throw parse_error("cannot open output file: " + path.string());
  }
  out << (mode == stream_mode::directed ? "#mode=directed\n" : "#mode=undirected\n");
  char buf[64];
  for (const weighted_edge& e : edges) {
    const int len = std::snprintf(buf, sizeof buf, "%.17g", e.weight);
    out << e.u << ' ' << e.v << ' ' << std::string_view(buf, static_cast<std::size_t>(len));
    if (e.tag != 0) {
      out << ' ' << e.tag;
    }
    out << '\n';
  }
}

std::uint64_t sketch_body_size(std::uint64_t node_count, std::uint32_t m, bool compact) noexcept {
  const std::uint64_t entry = compact ? 16 : 24;
  return node_count * (8 + static_cast<std::uint64_t>(m) * 8 + static_cast<std::uint64_t>(m) * entry);
}

void write_sketch_file(const std::filesystem::path& path, const sketch_store& store,
                       bool compact) {
  if (compact && store.parallel_edges()) {
    throw invalid_config_error("compact layout cannot carry parallel-edge tags");
  }

  std::vector<std::uint8_t> body;
  body.reserve(sketch_body_size(store.node_count(), store.m(), compact));
  for (const auto& [id, sk] : store.sketches()) {  // std::map: ascending node id
    put_u64(body, id);
    for (double v : sk.values()) {
      put_f64(body, v);
    }
    for (const edge_key& e : sk.samples()) {
      put_u64(body, e.lo);
      put_u64(body, e.hi);
      if (compact) {
        if (e.tag != 0) {
          throw invalid_config_error("compact layout cannot carry parallel-edge tags");
        }
      } else {
        put_u64(body, e.tag);
      }
    }
  }

  std::vector<std::uint8_t> head;
  head.insert(head.end(), kMagic, kMagic + 4);
  put_u16(head, kVersion);
  std::uint8_t flags = 0;
  if (store.mode() == stream_mode::directed) flags |= kFlagDirected;
  if (store.parallel_edges()) flags |= kFlagParallel;
  if (store.has_self_loops()) flags |= kFlagSelfLoops;
  if (compact) flags |= kFlagCompact;
  head.push_back(flags);
  head.push_back(0);  // reserved
  put_u32(head, store.m());
  put_u64(head, store.salt());
  put_u64(head, store.node_count());

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw parse_error("cannot open output file: " + path.string());
  }
  out.write(reinterpret_cast<const char*>(head.data()), static_cast<std::streamsize>(head.size()));
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  std::vector<std::uint8_t> tail;
  put_u64(tail, fnv1a64(body));
  out.write(reinterpret_cast<const char*>(tail.data()), static_cast<std::streamsize>(tail.size()));
  if (!out) {
    throw parse_error("write failed: " + path.string());
  }
}

sketch_store read_sketch_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw parse_error("cannot open sketch file: " + path.string());
  }
  std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (raw.size() < 28 + 8 || std::memcmp(raw.data(), kMagic, 4) != 0) {
    throw corrupt_file_error("not a sketch file: " + path.string());
  }
  reader r(raw.data(), raw.size());
  r.u32();  // magic, already checked
  const std::uint16_t version = r.u16();
  if (version != kVersion) {
    throw corrupt_file_error("unsupported sketch file version " + std::to_string(version));
  }
  const std::uint8_t flags = r.u8();
  r.u8();  // reserved
  const std::uint32_t m = r.u32();
  const std::uint64_t salt = r.u64();
  const std::uint64_t node_count = r.u64();
  const bool compact = (flags & kFlagCompact) != 0;

  const std::uint64_t body_size = sketch_body_size(node_count, m, compact);
  if (raw.size() != 28 + body_size + 8) {
    throw corrupt_file_error("sketch file size mismatch");
  }
  const std::uint64_t checksum =
      fnv1a64(std::span<const std::uint8_t>(raw.data() + 28, body_size));

  sketch_store store(m, salt,
                     (flags & kFlagDirected) != 0 ? stream_mode::directed : stream_mode::undirected,
                     (flags & kFlagParallel) != 0);
  store.set_self_loops((flags & kFlagSelfLoops) != 0);

  for (std::uint64_t i = 0; i < node_count; ++i) {
    const node_id id = r.u64();
    std::vector<double> values(m);
    for (std::uint32_t k = 0; k < m; ++k) {
      values[k] = r.f64();
    }
    std::vector<edge_key> samples(m);
    for (std::uint32_t k = 0; k < m; ++k) {
      samples[k].lo = r.u64();
      samples[k].hi = r.u64();
      samples[k].tag = compact ? 0 : r.u64();
    }
    try {
      store.adopt(id, sketch(std::move(values), std::move(samples)));
    } catch (const error& e) {
      throw corrupt_file_error("node record " + std::to_string(i) + ": " + e.what());
    }
  }

  std::uint64_t stored = 0;
  for (int b = 7; b >= 0; --b) {
    stored = (stored << 8) | raw[raw.size() - 8 + static_cast<std::size_t>(b)];
  }
  if (stored != checksum) {
    throw corrupt_file_error("sketch file checksum mismatch");
  }
  return store;
}

void write_partition_file(const std::filesystem::path& path, const partition& part,
                          double modularity_value) {
  std::ofstream out(path);
  if (!out) {
    throw parse_error("cannot open output file: " + path.string());
  }
  for (const auto& [node, comm] : part.assignment) {
    out << node << '\t' << comm << '\n';
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", modularity_value);
  out << "#modularity_estimate=" << buf << '\n';
}

partition_file_data read_partition_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw parse_error("cannot open partition file: " + path.string());
  }
  partition_file_data data;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("#modularity_estimate=", 0) == 0) {
      data.modularity_value = std::strtod(line.c_str() + 21, nullptr);
      continue;
    }
    if (line.empty()) {
      continue;
    }
    std::istringstream ls(line);
    node_id node = 0;
    std::uint64_t comm = 0;
    if (!(ls >> node >> comm)) {
      throw parse_error(path.string() + ":" + std::to_string(line_no) + ": expected 'node community'");
    }
    if (!data.part.assignment.emplace(node, comm).second) {
      throw parse_error(path.string() + ":" + std::to_string(line_no) + ": duplicate node");
    }
  }
  return data;
}

sketch_store build_store(const edge_stream_data& stream, std::uint32_t m, std::uint64_t salt,
                         bool parallel_edges, std::uint32_t shards) {
  if (shards == 0) {
    throw invalid_config_error("build_store: shards must be at least 1");
  }

  // pre-assign tags in global stream order so sharding cannot change them
  std::vector<weighted_edge> edges = stream.edges;
  if (parallel_edges) {
    std::map<std::pair<node_id, node_id>, std::uint64_t> seen;
    for (weighted_edge& e : edges) {
      if (e.tag == 0) {
        const edge_key k = edge_key::canonical(e.u, e.v, 0);
        e.tag = ++seen[{k.lo, k.hi}];
      }
    }
  }

  if (shards == 1) {
    sketch_store store(m, salt, stream.mode, parallel_edges);
    store.ingest_stream(edges);
    return store;
  }

  std::vector<sketch_store> parts;
  parts.reserve(shards);
  std::vector<std::vector<weighted_edge>> split(shards);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    split[i % shards].push_back(edges[i]);
  }
  for (std::uint32_t s = 0; s < shards; ++s) {
    parts.emplace_back(m, salt, stream.mode, parallel_edges);
  }
  std::vector<std::thread> pool;
  pool.reserve(shards);
  for (std::uint32_t s = 0; s < shards; ++s) {
    pool.emplace_back(
        [&parts, &split, s] { parts[s].ingest_stream(split[s]); });
  }
  for (auto& t : pool) {
    t.join();
  }

  // tree merge
  while (parts.size() > 1) {
    std::vector<sketch_store> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
      next.push_back(sketch_store::merge(parts[i], parts[i + 1]));
    }
    if (parts.size() % 2 == 1) {
      next.push_back(std::move(parts.back()));
    }
    parts = std::move(next);
  }
  return std::move(parts.front());
}

}  // namespace esk::io
