#include "esk/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "esk/rng.hpp"

namespace esk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double relative_se(std::uint32_t m) {
  return m >= 3 ? 1.0 / std::sqrt(static_cast<double>(m - 2)) : kInf;
}

void require_undirected(const sketch_store& store, const char* op) {
  if (store.mode() == stream_mode::directed) {
    throw unsupported_error(std::string(op) + ": directed stores are not supported");
  }
}

}  // namespace

estimate estimate_degree(const sketch& sk) {
  if (sk.empty()) {
    throw no_data_error("estimate_degree: sketch has seen no edges");
  }
  double sum = 0.0;
  for (double v : sk.values()) {
    sum += v;
  }
  estimate est;
  est.value = static_cast<double>(sk.size() - 1) / sum;
  est.std_error_bound = relative_se(sk.size());
  est.m_effective = sk.size();
  if (sk.size() < 3) {
    est.warning = "m < 3: estimator variance is undefined";
  }
  return est;
}

estimate estimate_volume(const sketch_store& store, std::span<const node_id> nodes) {
  require_undirected(store, "estimate_volume");
  estimate est;
  est.m_effective = store.m();
  est.std_error_bound = relative_se(store.m());
  for (node_id id : nodes) {
    est.value += estimate_degree(store.at(id)).value;
  }
  return est;
}

estimate estimate_volume(const sketch_store& store) {
  require_undirected(store, "estimate_volume");
  estimate est;
  est.m_effective = store.m();
  est.std_error_bound = relative_se(store.m());
  for (const auto& [id, sk] : store.sketches()) {
    (void)id;
    est.value += estimate_degree(sk).value;
  }
  return est;
}

estimate estimate_edge_count(const sketch_store& store) {
  require_undirected(store, "estimate_edge_count");
  if (store.has_self_loops()) {
    throw unsupported_error("estimate_edge_count: store contains self-loops");
  }
  estimate est = estimate_volume(store);
  est.value /= 2.0;
  return est;
}

estimate estimate_density(const sketch_store& store, std::uint64_t universe) {
  if (universe < 2) {
    throw invalid_config_error("estimate_density: node universe must have at least 2 nodes");
  }
  estimate est = estimate_edge_count(store);
  const double n = static_cast<double>(universe);
  est.value = 2.0 * est.value / (n * (n - 1.0));
  return est;
}

set_expression set_expression::intersect(std::vector<const sketch*> sketches) {
  set_expression e;
  e.conjuncts.push_back({std::move(sketches), {}});
  return e;
}

set_expression set_expression::difference(const sketch& a, const sketch& b) {
  set_expression e;
  e.conjuncts.push_back({{&a}, {&b}});
  return e;
}

set_expression set_expression::union_of(const sketch& a, const sketch& b) {
  set_expression e;
  e.conjuncts.push_back({{&a, &b}, {}});
  e.conjuncts.push_back({{&a}, {&b}});
  e.conjuncts.push_back({{&b}, {&a}});
  return e;
}

estimate estimate_set_expression(const set_expression& expr) {
  if (expr.conjuncts.empty()) {
    throw invalid_config_error("estimate_set_expression: empty expression");
  }
  std::vector<const sketch*> all;
  for (const auto& c : expr.conjuncts) {
    if (c.positives.empty()) {
      throw invalid_config_error("estimate_set_expression: conjunct without positive literals");
    }
    for (const sketch* s : c.positives) {
      all.push_back(s);
    }
    for (const sketch* s : c.negatives) {
      all.push_back(s);
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  const std::uint32_t m = all.front()->size();
  for (const sketch* s : all) {
    if (s->size() != m) {
      throw incompatible_sketch_error("estimate_set_expression: sketch sizes differ");
    }
  }

  std::uint32_t matches = 0;
  for (const auto& c : expr.conjuncts) {
    for (std::uint32_t k = 0; k < m; ++k) {
      const double v = c.positives.front()->values()[k];
      bool ok = true;
      for (const sketch* s : c.positives) {
        ok = ok && s->values()[k] == v;
      }
      for (const sketch* s : c.negatives) {
        ok = ok && v < s->values()[k];
      }
      matches += ok;
    }
  }

  double min_sum = 0.0;  // union of everything referenced (the Omega set)
  for (std::uint32_t k = 0; k < m; ++k) {
    double mn = kInf;
    for (const sketch* s : all) {
      mn = std::min(mn, s->values()[k]);
    }
    min_sum += mn;
  }

  estimate est;
  est.m_effective = matches;
  const double omega_hat = static_cast<double>(m - 1) / min_sum;
  est.value = (static_cast<double>(matches) / m) * omega_hat;
  est.std_error_bound =
      est.value > 0.0 ? std::sqrt(omega_hat / (static_cast<double>(m) * est.value)) : kInf;
  return est;
}

std::optional<std::uint32_t> subset_witness(const sketch& a, const sketch& b) {
  if (a.size() != b.size()) {
    throw incompatible_sketch_error("subset_witness: sketch sizes differ");
  }
  for (std::uint32_t k = 0; k < a.size(); ++k) {
    if (b.values()[k] > a.values()[k]) {
      return k;
    }
  }
  return std::nullopt;
}

super_node_sketch super_node(const sketch_store& store, std::span<const node_id> nodes) {
  std::vector<node_id> sorted(nodes.begin(), nodes.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  super_node_sketch out{sketch(store.m()), {}};
  for (node_id id : sorted) {
    out.sk = sketch::merge(out.sk, store.at(id));
    out.members.insert(id);
  }
  return out;
}

estimate internal_fraction(const super_node_sketch& snk) {
  if (snk.sk.empty()) {
    throw no_data_error("internal_fraction: super-node sketch has seen no edges");
  }
  const std::uint32_t m = snk.sk.size();
  std::uint32_t internal = 0;
  for (const edge_key& e : snk.sk.samples()) {
    internal += snk.contains(e.lo) && snk.contains(e.hi);
  }
  estimate est;
  est.m_effective = m;
  est.value = static_cast<double>(internal) / m;
  est.std_error_bound =
      est.value > 0.0 ? std::sqrt(est.value * (1.0 - est.value) / m) / est.value : kInf;
  return est;
}

estimate internal_weight(const super_node_sketch& snk, bool self_loops_present) {
  const estimate w_hat = estimate_degree(snk.sk);
  const estimate p_hat = internal_fraction(snk);
  estimate est;
  est.m_effective = snk.sk.size();
  est.value = w_hat.value * p_hat.value;
  const double m = snk.sk.size();
  const double p = p_hat.value;
  est.std_error_bound = p > 0.0 ? std::sqrt((m + p - 1.0) / (p * m * (m - 2.0))) : kInf;
  if (self_loops_present) {
    est.warning = "store contains self-loops; their weight enters e(C) once per loop";
  }
  return est;
}

estimate degree_in_community(const sketch_store& store, node_id v,
                             const std::unordered_set<node_id>& community) {
  const sketch& sk = store.at(v);
  const estimate deg = estimate_degree(sk);
  std::uint32_t hits = 0;
  for (const edge_key& e : sk.samples()) {
    hits += community.count(e.other(v)) != 0;
  }
  const double m = sk.size();
  estimate est;
  est.m_effective = sk.size();
  est.value = deg.value * (static_cast<double>(hits) / m);
  est.std_error_bound = est.value > 0.0 ? std::sqrt(deg.value / (est.value * m)) : kInf;
  return est;
}

node_id random_neighbor(const sketch& sk, node_id v, std::mt19937_64& rng) {
  if (sk.empty()) {
    throw no_data_error("random_neighbor: sketch has seen no edges");
  }
  const auto cell = static_cast<std::uint32_t>(bounded(rng, sk.size()));
  return sk.samples()[cell].other(v);
}

}  // namespace esk
