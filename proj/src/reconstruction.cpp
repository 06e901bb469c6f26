#include "esk/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <thread>
#include <unordered_map>

namespace esk {

bool sampled_graph::has_pair(node_id u, node_id v) const {
  const auto it = adj.find(std::min(u, v));
  if (it == adj.end()) {
    return false;
  }
  const node_id other = std::max(u, v);
  return std::binary_search(it->second.begin(), it->second.end(), other);
}

sampled_graph sampled_edge_graph(const sketch_store& store) {
  std::set<edge_key> unique;
  for (const auto& [id, sk] : store.sketches()) {
    (void)id;
    for (const edge_key& e : sk.samples()) {
      if (!e.is_sentinel()) {
        unique.insert(e);
      }
    }
  }
  sampled_graph sg;
  sg.edges.assign(unique.begin(), unique.end());
  std::set<std::pair<node_id, node_id>> pairs;
  for (const edge_key& e : sg.edges) {
    pairs.emplace(e.lo, e.hi);
  }
  sg.pair_count_ = pairs.size();
  for (const auto& [lo, hi] : pairs) {
    sg.adj[lo].push_back(hi);
    if (hi != lo) {
      sg.adj[hi].push_back(lo);
    }
  }
  for (auto& [id, nbrs] : sg.adj) {
    (void)id;
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  return sg;
}

namespace {

// breadth-first ball of the given radius on the sampled-edge graph
std::vector<node_id> bfs_ball(const sampled_graph& sg, node_id center, std::uint32_t radius) {
  std::vector<node_id> members{center};
  std::unordered_map<node_id, std::uint32_t> dist{{center, 0}};
  std::deque<node_id> queue{center};
  while (!queue.empty()) {
    const node_id u = queue.front();
    queue.pop_front();
    const std::uint32_t du = dist[u];
    if (du == radius) {
      continue;
    }
    const auto it = sg.adj.find(u);
    if (it == sg.adj.end()) {
      continue;
    }
    for (node_id v : it->second) {
      if (dist.emplace(v, du + 1).second) {
        members.push_back(v);
        queue.push_back(v);
      }
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

}  // namespace

neighborhood_sketch make_neighborhood(const sketch_store& store, const sampled_graph& sg,
                                      node_id center, std::uint32_t radius) {
  if (store.find(center) == nullptr) {
    throw missing_node_error("make_neighborhood: unknown node " + std::to_string(center));
  }
  neighborhood_sketch out{center, radius, sketch(store.m()), bfs_ball(sg, center, radius)};
  for (node_id v : out.members) {
    if (const sketch* sk = store.find(v)) {
      out.sk = sketch::merge(out.sk, *sk);
    }
  }
  return out;
}

double jaccard_estimate(const sketch& a, const sketch& b) {
  if (a.size() != b.size()) {
    throw incompatible_sketch_error("jaccard_estimate: sketch sizes differ");
  }
  std::uint32_t matches = 0;
  for (std::uint32_t k = 0; k < a.size(); ++k) {
    matches += a.values()[k] == b.values()[k];
  }
  return static_cast<double>(matches) / a.size();
}

double jaccard_estimate(const neighborhood_sketch& a, const neighborhood_sketch& b) {
  if (a.radius != b.radius) {
    throw incompatible_sketch_error("jaccard_estimate: neighborhood radii differ");
  }
  return jaccard_estimate(a.sk, b.sk);
}

namespace {

// All-radius neighborhood sketches for every node, built level by level:
// the radius-d ball around u is the union of radius-(d-1) balls around u and
// its sampled neighbors, and merging is idempotent, so the recursion is exact.
std::vector<std::unordered_map<node_id, sketch>> all_neighborhoods(const sketch_store& store,
                                                                   const sampled_graph& sg,
                                                                   std::uint32_t max_radius) {
  std::vector<std::unordered_map<node_id, sketch>> levels(max_radius + 1);
  for (const auto& [id, sk] : store.sketches()) {
    levels[0].emplace(id, sk);
  }
  for (std::uint32_t d = 1; d <= max_radius; ++d) {
    for (const auto& [id, sk] : levels[d - 1]) {
      sketch merged = sk;
      const auto it = sg.adj.find(id);
      if (it != sg.adj.end()) {
        for (node_id v : it->second) {
          const auto prev = levels[d - 1].find(v);
          if (prev != levels[d - 1].end()) {
            merged = sketch::merge(merged, prev->second);
          }
        }
      }
      levels[d].emplace(id, std::move(merged));
    }
  }
  return levels;
}

std::vector<std::pair<node_id, node_id>> khop_candidates(const sketch_store& store,
                                                         const sampled_graph& sg,
                                                         std::uint32_t k) {
  std::vector<std::pair<node_id, node_id>> pairs;
  for (const auto& [u, sk] : store.sketches()) {
    (void)sk;
    for (node_id v : bfs_ball(sg, u, k)) {
      if (v > u && store.find(v) != nullptr) {
        pairs.emplace_back(u, v);
      }
    }
  }
  return pairs;
}

std::vector<std::pair<node_id, node_id>> all_candidates(const sketch_store& store) {
  std::vector<node_id> ids;
  ids.reserve(store.node_count());
  for (const auto& [id, sk] : store.sketches()) {
    (void)sk;
    ids.push_back(id);
  }
  std::vector<std::pair<node_id, node_id>> pairs;
  pairs.reserve(ids.size() * (ids.size() - 1) / 2);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      pairs.emplace_back(ids[i], ids[j]);
    }
  }
  return pairs;
}

}  // namespace

std::vector<scored_pair> score_pairs(const sketch_store& store, const score_options& opt) {
  if (!(opt.alpha > 0.0)) {
    throw invalid_config_error("score_pairs: alpha must be positive");
  }
  const sampled_graph sg = sampled_edge_graph(store);
  const auto levels = all_neighborhoods(store, sg, opt.max_radius);
  const auto candidates = opt.policy == candidate_policy::khop
                              ? khop_candidates(store, sg, opt.max_radius)
                              : all_candidates(store);

  std::vector<scored_pair> scored(candidates.size());
  const auto score_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const auto [u, v] = candidates[i];
      scored_pair sp{u, v, 0.0, false};
      if (opt.use_pinning && sg.has_pair(u, v)) {
        sp.score = 1.0;
        sp.pinned = true;
      } else {
        double weight = 1.0;
        for (std::uint32_t d = 0; d <= opt.max_radius; ++d) {
          sp.score += weight * jaccard_estimate(levels[d].at(u), levels[d].at(v));
          weight *= opt.alpha;
        }
      }
      scored[i] = sp;
    }
  };

  const std::uint32_t threads = std::max<std::uint32_t>(opt.threads, 1);
  if (threads == 1 || scored.size() < 2 * threads) {
    score_range(0, scored.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (scored.size() + threads - 1) / threads;
    for (std::uint32_t t = 0; t < threads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(scored.size(), lo + chunk);
      if (lo < hi) {
        pool.emplace_back(score_range, lo, hi);
      }
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  std::sort(scored.begin(), scored.end(), [](const scored_pair& a, const scored_pair& b) {
    if (a.pinned != b.pinned) {
      return a.pinned;
    }
    if (a.score != b.score) {
      return a.score > b.score;
    }
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
  return scored;
}

precision_result precision_at(std::span<const scored_pair> scored,
                              const std::vector<std::pair<node_id, node_id>>& truth,
                              std::uint64_t t) {
  if (t < 1) {
    throw invalid_config_error("precision_at: t must be at least 1");
  }
  std::set<std::pair<node_id, node_id>> truth_set;
  for (const auto& [u, v] : truth) {
    truth_set.emplace(std::min(u, v), std::max(u, v));
  }
  precision_result res;
  if (t > scored.size()) {
    t = scored.size();
    res.truncated = true;
  }
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < t; ++i) {
    hits += truth_set.count({scored[i].u, scored[i].v}) != 0;
  }
  res.value = t > 0 ? static_cast<double>(hits) / static_cast<double>(t) : 0.0;
  return res;
}

}  // namespace esk
