#include "esk/community.hpp"

#include <algorithm>
#include <numeric>

#include "esk/rng.hpp"

namespace esk {

void partition::refresh(const sketch_store& store) {
  communities.clear();
  for (const auto& [node, comm] : assignment) {
    auto& info = communities[comm];
    info.members.push_back(node);
    info.volume_hat += estimate_degree(store.at(node)).value;
  }
}

std::uint64_t partition::community_count() const {
  std::unordered_set<std::uint64_t> labels;
  for (const auto& [node, comm] : assignment) {
    (void)node;
    labels.insert(comm);
  }
  return labels.size();
}

louvain_engine::louvain_engine(const sketch_store& store, louvain_config cfg)
    : store_(store), cfg_(cfg), rng_(fork_seed(cfg.seed, 0x10071ULL)) {
  if (store.mode() == stream_mode::directed) {
    throw unsupported_error("louvain: directed stores are not supported");
  }
  if (store.node_count() == 0) {
    throw no_data_error("louvain: store has no edges");
  }

  units_.reserve(store.node_count());
  double vol_v = 0.0;
  for (const auto& [id, sk] : store.sketches()) {
    unit_state u;
    u.sk = &sk;
    u.w_hat = estimate_degree(sk).value;
    u.vol_hat = u.w_hat;  // a single node's volume is its degree
    u.members = {id};
    unit_of_.emplace(id, static_cast<std::uint32_t>(units_.size()));
    units_.push_back(std::move(u));
    vol_v += units_.back().vol_hat;
  }
  // estimated once per run and frozen across levels
  e_v_ = vol_v / 2.0;
  if (!(e_v_ > 0.0)) {
    throw no_data_error("louvain: total edge weight estimate is zero");
  }

  comm_of_.resize(units_.size());
  std::iota(comm_of_.begin(), comm_of_.end(), std::uint64_t{0});
  comm_vol_.resize(units_.size());
  comm_size_.assign(units_.size(), 1);
  for (std::size_t i = 0; i < units_.size(); ++i) {
    comm_vol_[i] = units_[i].vol_hat;
  }
}

std::uint32_t louvain_engine::unit_of(node_id original) const {
  const auto it = unit_of_.find(original);
  if (it == unit_of_.end()) {
    throw missing_node_error("louvain: unknown node " + std::to_string(original));
  }
  return it->second;
}

std::uint64_t louvain_engine::community_of(std::uint32_t unit) const { return comm_of_.at(unit); }

std::map<std::uint64_t, std::uint32_t> louvain_engine::candidate_counts(std::uint32_t unit) const {
  std::map<std::uint64_t, std::uint32_t> counts;
  for (const edge_key& e : units_[unit].sk->samples()) {
    // endpoint on the far side of the moving unit; cells whose sampled edge
    // stays inside the unit do not witness any outside community
    const node_id other = unit_of_.at(e.lo) == unit ? e.hi : e.lo;
    const std::uint32_t ou = unit_of_.at(other);
    if (ou == unit) {
      continue;
    }
    ++counts[comm_of_[ou]];
  }
  return counts;
}

double louvain_engine::gain_from_counts(std::uint32_t unit, std::uint64_t community,
                                        const std::map<std::uint64_t, std::uint32_t>& counts)
    const {
  const unit_state& u = units_[unit];
  const double m = static_cast<double>(store_.m());
  const std::uint64_t cur = comm_of_[unit];

  const auto count_of = [&](std::uint64_t c) -> double {
    const auto it = counts.find(c);
    return it == counts.end() ? 0.0 : static_cast<double>(it->second);
  };

  const double cut_target = u.w_hat * count_of(community) / m;
  const double cut_current = u.w_hat * count_of(cur) / m;
  const double vol_current_minus = comm_vol_[cur] - u.vol_hat;

  // difference of two gain numerators; the deg^2 terms cancel
  return gain_numerator(e_v_, cut_target, comm_vol_[community], u.vol_hat) -
         gain_numerator(e_v_, cut_current, vol_current_minus, u.vol_hat);
}

gain_cache louvain_engine::snapshot(std::uint32_t unit, std::uint64_t community) const {
  return gain_cache{e_v_, comm_vol_.at(community), units_.at(unit).vol_hat, version_};
}

double louvain_engine::estimate_gain(std::uint32_t unit, std::uint64_t community,
                                     const gain_cache& cache) const {
  if (cache.version != version_) {
    throw stale_cache_error("estimate_gain: cached inputs predate the latest move");
  }
  const auto counts = candidate_counts(unit);
  const auto it = counts.find(community);
  const double count = it == counts.end() ? 0.0 : static_cast<double>(it->second);
  const double deg_in_c = units_[unit].w_hat * count / static_cast<double>(store_.m());
  return gain_numerator(cache.e_v_hat, deg_in_c, cache.vol_c_hat, cache.deg_v_hat);
}

double louvain_engine::move_gain(std::uint32_t unit, std::uint64_t community) const {
  return gain_from_counts(unit, community, candidate_counts(unit));
}

void louvain_engine::apply_move(std::uint32_t unit, std::uint64_t community) {
  const std::uint64_t cur = comm_of_.at(unit);
  if (cur == community) {
    return;
  }
  comm_vol_[cur] -= units_[unit].vol_hat;
  comm_vol_[community] += units_[unit].vol_hat;
  --comm_size_[cur];
  ++comm_size_[community];
  comm_of_[unit] = community;
  ++version_;
  log_.push_back({unit, cur, community});
}

std::uint64_t louvain_engine::run_phase1() {
  std::uint64_t total_moves = 0;
  std::uint32_t sweeps = 0;
  std::vector<std::uint32_t> order(units_.size());
  std::iota(order.begin(), order.end(), 0u);

  for (; sweeps < cfg_.sweep_cap; ) {
    ++sweeps;
    shuffle_vec(order, rng_);
    std::uint64_t sweep_moves = 0;
    for (std::uint32_t u : order) {
      const auto counts = candidate_counts(u);
      const std::uint64_t cur = comm_of_[u];
      double best_gain = 0.0;
      std::uint64_t best_comm = cur;
      for (const auto& [comm, cnt] : counts) {  // ascending labels: ties keep the lowest
        (void)cnt;
        if (comm == cur) {
          continue;
        }
        const double gain = gain_from_counts(u, comm, counts);
        if (gain > best_gain) {
          best_gain = gain;
          best_comm = comm;
        }
      }
      if (best_comm != cur) {
        apply_move(u, best_comm);
        ++sweep_moves;
      }
    }
    total_moves += sweep_moves;
    if (sweep_moves == 0) {
      break;
    }
  }

  std::uint64_t communities = 0;
  for (std::uint32_t s : comm_size_) {
    communities += s > 0;
  }
  levels_.push_back({level_, sweeps, total_moves, communities});
  return total_moves;
}

bool louvain_engine::coarsen() {
  // surviving communities in ascending label order become the new units
  std::vector<std::uint64_t> labels;
  for (std::uint64_t c = 0; c < comm_size_.size(); ++c) {
    if (comm_size_[c] > 0) {
      labels.push_back(c);
    }
  }
  if (labels.size() == units_.size()) {
    return false;
  }

  std::unordered_map<std::uint64_t, std::uint32_t> new_index;
  for (std::uint32_t i = 0; i < labels.size(); ++i) {
    new_index.emplace(labels[i], i);
  }

  std::vector<sketch> new_owned;
  new_owned.reserve(labels.size());
  std::vector<unit_state> new_units(labels.size());

  for (std::uint32_t i = 0; i < labels.size(); ++i) {
    sketch merged(store_.m());
    unit_state& nu = new_units[i];
    for (std::uint32_t u = 0; u < units_.size(); ++u) {
      if (comm_of_[u] != labels[i]) {
        continue;
      }
      merged = sketch::merge(merged, *units_[u].sk);
      nu.vol_hat += units_[u].vol_hat;
      nu.members.insert(nu.members.end(), units_[u].members.begin(), units_[u].members.end());
    }
    std::sort(nu.members.begin(), nu.members.end());
    nu.w_hat = estimate_degree(merged).value;
    new_owned.push_back(std::move(merged));
  }
  for (std::uint32_t i = 0; i < labels.size(); ++i) {
    new_units[i].sk = &new_owned[i];
  }

  unit_of_.clear();
  for (std::uint32_t i = 0; i < new_units.size(); ++i) {
    for (node_id member : new_units[i].members) {
      unit_of_.emplace(member, i);
    }
  }
  units_ = std::move(new_units);
  owned_ = std::move(new_owned);
  for (std::uint32_t i = 0; i < units_.size(); ++i) {
    units_[i].sk = &owned_[i];
  }

  comm_of_.resize(units_.size());
  std::iota(comm_of_.begin(), comm_of_.end(), std::uint64_t{0});
  comm_vol_.resize(units_.size());
  comm_size_.assign(units_.size(), 1);
  for (std::size_t i = 0; i < units_.size(); ++i) {
    comm_vol_[i] = units_[i].vol_hat;
  }
  ++version_;
  ++level_;
  return true;
}

partition louvain_engine::current_partition() const {
  // densify labels by ascending smallest original member
  std::map<std::uint64_t, node_id> min_member;
  for (std::uint32_t u = 0; u < units_.size(); ++u) {
    auto [it, fresh] = min_member.try_emplace(comm_of_[u], units_[u].members.front());
    if (!fresh) {
      it->second = std::min(it->second, units_[u].members.front());
    }
  }
  std::vector<std::pair<node_id, std::uint64_t>> ordered;  // (min member, label)
  ordered.reserve(min_member.size());
  for (const auto& [label, member] : min_member) {
    ordered.emplace_back(member, label);
  }
  std::sort(ordered.begin(), ordered.end());
  std::unordered_map<std::uint64_t, std::uint64_t> dense;
  for (std::uint64_t i = 0; i < ordered.size(); ++i) {
    dense.emplace(ordered[i].second, i);
  }

  partition part;
  part.level = level_;
  for (std::uint32_t u = 0; u < units_.size(); ++u) {
    for (node_id member : units_[u].members) {
      part.assignment.emplace(member, dense.at(comm_of_[u]));
    }
  }
  part.refresh(store_);
  return part;
}

louvain_result louvain_engine::run() {
  while (true) {
    const std::uint64_t moves = run_phase1();
    if (moves == 0) {
      break;
    }
    if (!coarsen()) {
      break;
    }
    if (level_ >= cfg_.max_levels) {
      break;
    }
  }
  louvain_result res;
  res.part = current_partition();
  res.mod = estimate_modularity(store_, res.part);
  res.levels = levels_;
  return res;
}

louvain_result louvain(const sketch_store& store, const louvain_config& cfg) {
  louvain_engine engine(store, cfg);
  return engine.run();
}

modularity_estimate estimate_modularity(const sketch_store& store, const partition& part) {
  if (store.mode() == stream_mode::directed) {
    throw unsupported_error("estimate_modularity: directed stores are not supported");
  }
  if (store.node_count() == 0 || part.assignment.empty()) {
    throw no_data_error("estimate_modularity: empty graph or partition");
  }

  std::map<std::uint64_t, std::vector<node_id>> members;
  for (const auto& [id, sk] : store.sketches()) {
    (void)sk;
    const auto it = part.assignment.find(id);
    if (it == part.assignment.end()) {
      throw missing_node_error("estimate_modularity: node " + std::to_string(id) +
                               " missing from the partition");
    }
    members[it->second].push_back(id);
  }

  modularity_estimate out;
  out.e_v_hat = estimate_edge_count(store).value;
  if (!(out.e_v_hat > 0.0)) {
    throw no_data_error("estimate_modularity: zero total edge weight estimate");
  }

  double vol_v = 0.0;
  for (const auto& [label, nodes] : members) {
    (void)label;
    const super_node_sketch snk = super_node(store, nodes);
    const double e_hat = internal_weight(snk, store.has_self_loops()).value;
    const double vol_hat = estimate_volume(store, nodes).value;
    out.per_community_terms.emplace_back(e_hat, vol_hat);
    vol_v += vol_hat;
  }
  for (const auto& [e_hat, vol_hat] : out.per_community_terms) {
    out.value += e_hat / out.e_v_hat - (vol_hat / vol_v) * (vol_hat / vol_v);
  }
  return out;
}

split_half_result split_half_modularity(const sketch_store& store, const louvain_config& cfg) {
  if (store.m() % 2 != 0 || store.m() < 6) {
    throw invalid_config_error("split_half_modularity: m must be even and at least 6");
  }
  const sketch_store half_a = store.slice_positions(0, store.m() / 2);
  const sketch_store half_b = store.slice_positions(store.m() / 2, store.m());

  const louvain_result on_a = louvain(half_a, cfg);
  const louvain_result on_b = louvain(half_b, cfg);

  split_half_result res;
  res.eval_a_on_b = estimate_modularity(half_b, on_a.part);
  res.eval_b_on_a = estimate_modularity(half_a, on_b.part);
  res.estimate = (res.eval_a_on_b.value + res.eval_b_on_a.value) / 2.0;
  res.part = on_a.part;
  return res;
}

double exact_modularity(const oracle_graph& g, const partition& part) {
  const double e_v = g.total_edge_weight();
  if (!(e_v > 0.0)) {
    throw no_data_error("exact_modularity: graph has no edge weight");
  }
  std::map<std::uint64_t, std::vector<node_id>> members;
  for (const auto& [node, comm] : part.assignment) {
    members[comm].push_back(node);
  }
  double vol_v = 0.0;
  for (node_id u = 1; u <= g.n(); ++u) {
    vol_v += g.degree(u);
  }
  double mod = 0.0;
  for (const auto& [label, nodes] : members) {
    (void)label;
    const auto st = g.internal(nodes);
    const double vol_c = g.volume(nodes);
    mod += st.e / e_v - (vol_c / vol_v) * (vol_c / vol_v);
  }
  return mod;
}

}  // namespace esk
