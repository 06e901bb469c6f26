#include "esk/graphgen.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "esk/rng.hpp"

namespace esk {

namespace {
constexpr std::uint64_t kTopologyDomain = 0x1;
constexpr std::uint64_t kWeightDomain = 0x2;
constexpr std::uint64_t kShuffleDomain = 0x3;
}  // namespace

oracle_graph::oracle_graph(std::uint64_t n) : n_(n), adj_(n + 1) {}

void oracle_graph::add_edge(node_id u, node_id v, double w) {
  if (u == 0 || v == 0 || u > n_ || v > n_) {
    throw reserved_id_error("oracle_graph: node id outside the universe");
  }
  if (!(w > 0.0)) {
    throw invalid_weight_error("oracle_graph: weight must be positive");
  }
  adj_[u].emplace_back(v, w);
  if (v != u) {
    adj_[v].emplace_back(u, w);
  }
  ++edge_count_;
  total_weight_ += w;
}

std::span<const std::pair<node_id, double>> oracle_graph::neighbors(node_id u) const {
  return adj_.at(u);
}

double oracle_graph::degree(node_id u) const {
  double d = 0.0;
  for (const auto& [v, w] : adj_.at(u)) {
    (void)v;
    d += w;
  }
  return d;
}

double oracle_graph::volume(std::span<const node_id> nodes) const {
  double vol = 0.0;
  for (node_id u : nodes) {
    vol += degree(u);
  }
  return vol;
}

std::uint64_t oracle_graph::non_isolated_count() const {
  std::uint64_t c = 0;
  for (std::uint64_t u = 1; u <= n_; ++u) {
    c += !adj_[u].empty();
  }
  return c;
}

oracle_graph::internal_stats oracle_graph::internal(std::span<const node_id> nodes) const {
  std::vector<bool> in(n_ + 1, false);
  for (node_id u : nodes) {
    in.at(u) = true;
  }
  internal_stats st;
  for (node_id u : nodes) {
    for (const auto& [v, w] : adj_[u]) {
      if (v == u) {  // self-loop, stored once
        st.w += w;
        st.e += w;
        continue;
      }
      if (in[v]) {
        if (u < v) {  // count each internal edge once
          st.w += w;
          st.e += w;
        }
      } else {
        st.w += w;
      }
    }
  }
  st.p = st.w > 0.0 ? st.e / st.w : 0.0;
  return st;
}

std::uint32_t sbm_block_of(node_id id, std::uint32_t b) noexcept {
  return static_cast<std::uint32_t>((id - 1) % b) + 1;
}

sbm_output sbm_generate(const sbm_config& cfg) {
  if (cfg.n == 0 || cfg.b == 0 || cfg.b > cfg.n) {
    throw invalid_config_error("sbm_generate: need 1 <= b <= n");
  }
  if (!(cfg.q >= 0.0) || !(cfg.p >= cfg.q) || !(cfg.p <= 1.0)) {
    throw invalid_config_error("sbm_generate: need 0 <= q <= p <= 1");
  }

  std::mt19937_64 topo(fork_seed(cfg.seed, kTopologyDomain));
  std::mt19937_64 wgen(fork_seed(cfg.seed, kWeightDomain));
  std::mt19937_64 shuf(fork_seed(cfg.seed, kShuffleDomain));

  sbm_output out{oracle_graph(cfg.n), {}};
  out.graph.block_label.assign(cfg.n + 1, 0);
  for (node_id u = 1; u <= cfg.n; ++u) {
    out.graph.block_label[u] = sbm_block_of(u, cfg.b);
  }

  for (node_id u = 1; u <= cfg.n; ++u) {
    for (node_id v = u + 1; v <= cfg.n; ++v) {
      const bool same = out.graph.block_label[u] == out.graph.block_label[v];
      const double prob = same ? cfg.p : cfg.q;
      if (unit_open(topo) < prob) {
        const double w = cfg.unit_weights ? 1.0 : exp1(wgen);
        out.graph.add_edge(u, v, w);
        out.stream.push_back({u, v, w, 0});
      }
    }
  }
  shuffle_vec(out.stream, shuf);
  return out;
}

double expected_sbm_edges(const sbm_config& cfg) {
  if (cfg.n == 0 || cfg.b == 0 || cfg.b > cfg.n) {
    throw invalid_config_error("expected_sbm_edges: need 1 <= b <= n");
  }
  const double n = static_cast<double>(cfg.n);
  double within_pairs = 0.0;
  for (std::uint32_t k = 0; k < cfg.b; ++k) {
    // round-robin block size
    const double size = static_cast<double>(cfg.n / cfg.b + (k < cfg.n % cfg.b ? 1 : 0));
    within_pairs += size * (size - 1.0) / 2.0;
  }
  const double all_pairs = n * (n - 1.0) / 2.0;
  return within_pairs * cfg.p + (all_pairs - within_pairs) * cfg.q;
}

namespace {

template <typename Emit>
void for_each_user_group(std::span<const rating> ratings, Emit&& emit) {
  std::vector<bool> seen_done;  // lazily grown bitmap of finished users
  auto mark_done = [&](std::uint64_t user) {
    if (seen_done.size() <= user) {
      seen_done.resize(user + 1, false);
    }
    seen_done[user] = true;
  };

  std::size_t i = 0;
  while (i < ratings.size()) {
    const std::uint64_t user = ratings[i].user;
    if (user < seen_done.size() && seen_done[user]) {
      throw parse_error("co-rating input not grouped by user (user " + std::to_string(user) +
                        " reappears at record " + std::to_string(i + 1) + ")");
    }
    std::vector<std::uint64_t> items;
    while (i < ratings.size() && ratings[i].user == user) {
      items.push_back(ratings[i].item);
      ++i;
    }
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    emit(user, items);
    mark_done(user);
  }
}

}  // namespace

std::vector<weighted_edge> corate_tagged(std::span<const rating> grouped_by_user) {
  std::vector<weighted_edge> out;
  for_each_user_group(grouped_by_user, [&](std::uint64_t user, const std::vector<std::uint64_t>& items) {
    for (std::size_t a = 0; a < items.size(); ++a) {
      for (std::size_t b = a + 1; b < items.size(); ++b) {
        out.push_back({items[a], items[b], 1.0, user});
      }
    }
  });
  return out;
}

std::vector<weighted_edge> corate_aggregate(std::span<const rating> grouped_by_user) {
  std::map<std::pair<node_id, node_id>, double> weights;
  for_each_user_group(grouped_by_user, [&](std::uint64_t, const std::vector<std::uint64_t>& items) {
    for (std::size_t a = 0; a < items.size(); ++a) {
      for (std::size_t b = a + 1; b < items.size(); ++b) {
        weights[{items[a], items[b]}] += 1.0;
      }
    }
  });
  std::vector<weighted_edge> out;
  out.reserve(weights.size());
  for (const auto& [pair, w] : weights) {
    out.push_back({pair.first, pair.second, w, 0});
  }
  return out;
}

}  // namespace esk
