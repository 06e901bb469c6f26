#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "esk/community.hpp"
#include "esk/graphgen.hpp"
#include "esk/rng.hpp"
#include "support/oracles.hpp"
#include "support/stats.hpp"

using namespace esk;
using namespace testsupport;

namespace {

// two unit-weight triangles {1,2,3} and {4,5,6}
const std::vector<weighted_edge> kTwoTriangles{{1, 2, 1.0, 0}, {2, 3, 1.0, 0}, {1, 3, 1.0, 0},
                                               {4, 5, 1.0, 0}, {5, 6, 1.0, 0}, {4, 6, 1.0, 0}};

oracle_graph two_triangle_graph() {
  oracle_graph g(6);
  for (const auto& e : kTwoTriangles) {
    g.add_edge(e.u, e.v, e.weight);
  }
  return g;
}

sketch_store two_triangle_store(std::uint32_t m, std::uint64_t salt) {
  sketch_store store(m, salt, stream_mode::undirected);
  store.ingest_stream(kTwoTriangles);
  return store;
}

partition partition_from_labels(std::span<const std::uint32_t> labels) {
  partition p;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    p.assignment.emplace(static_cast<node_id>(i + 1), labels[i]);
  }
  return p;
}

partition ground_truth_partition(const oracle_graph& g) {
  partition p;
  for (node_id u = 1; u <= g.n(); ++u) {
    if (!g.neighbors(u).empty()) {
      p.assignment.emplace(u, g.block_label[u]);
    }
  }
  return p;
}

}  // namespace

TEST_CASE("exact modularity fixtures") {
  oracle_graph tri(3);
  tri.add_edge(1, 2, 1.0);
  tri.add_edge(2, 3, 1.0);
  tri.add_edge(1, 3, 1.0);

  const std::uint32_t one_comm[] = {0, 0, 0};
  CHECK(exact_modularity(tri, partition_from_labels(one_comm)) == doctest::Approx(0.0));

  const std::uint32_t singletons[] = {0, 1, 2};
  CHECK(exact_modularity(tri, partition_from_labels(singletons)) ==
        doctest::Approx(-1.0 / 3.0));

  const std::uint32_t split[] = {0, 0, 0, 1, 1, 1};
  CHECK(exact_modularity(two_triangle_graph(), partition_from_labels(split)) ==
        doctest::Approx(0.5));
}

TEST_CASE("brute force confirms the triangle split is optimal") {
  const oracle_graph g = two_triangle_graph();
  double best = -2.0;
  std::vector<std::uint32_t> best_labels;
  for_each_partition(6, [&](std::span<const std::uint32_t> labels) {
    const double mod = exact_modularity(g, partition_from_labels(labels));
    if (mod > best) {
      best = mod;
      best_labels.assign(labels.begin(), labels.end());
    }
  });
  CHECK(best == doctest::Approx(0.5));
  CHECK(best_labels == std::vector<std::uint32_t>{0, 0, 0, 1, 1, 1});
}

TEST_CASE("gain numerator formula") {
  // moving into an empty community can never help: value is -deg^2
  CHECK(gain_numerator(10.0, 0.0, 0.0, 3.0) == doctest::Approx(-9.0));
  CHECK(gain_numerator(6.0, 2.0, 2.0, 2.0) == doctest::Approx(4.0 * 6.0 * 2.0 - 2.0 * 2.0 * 2.0 - 4.0));
}

TEST_CASE("estimated gain sign matches the brute-force gain on a 6-node graph") {
  // weighted two-triangle graph; move node 3 into the community {1, 2}
  std::vector<weighted_edge> edges{{1, 2, 2.0, 0}, {2, 3, 1.5, 0}, {1, 3, 1.0, 0},
                                   {4, 5, 2.2, 0}, {5, 6, 1.4, 0}, {4, 6, 0.9, 0},
                                   {3, 4, 0.1, 0}};
  oracle_graph g(6);
  for (const auto& e : edges) {
    g.add_edge(e.u, e.v, e.weight);
  }
  // exact modularity difference of assigning node 3 to {1,2} vs alone
  const std::uint32_t with[] = {0, 0, 0, 3, 4, 5};
  const std::uint32_t without[] = {0, 0, 2, 3, 4, 5};
  const double exact_gain = exact_modularity(g, partition_from_labels(with)) -
                            exact_modularity(g, partition_from_labels(without));
  REQUIRE(exact_gain > 0.0);

  std::size_t agree = 0;
  const std::size_t salts = 50;
  for (std::uint64_t salt = 0; salt < salts; ++salt) {
    sketch_store store(256, salt, stream_mode::undirected);
    store.ingest_stream(edges);
    louvain_engine engine(store, {});
    // units are nodes 1..6 in order; put 2 into 1's community
    engine.apply_move(engine.unit_of(2), engine.community_of(engine.unit_of(1)));
    const double est = engine.move_gain(engine.unit_of(3), engine.community_of(engine.unit_of(1)));
    agree += (est > 0.0) == (exact_gain > 0.0);
  }
  CHECK(agree >= static_cast<std::size_t>(0.9 * salts));
}

TEST_CASE("triangle closing move has positive estimated gain at m=64") {
  std::size_t positive = 0;
  const std::size_t salts = 200;
  for (std::uint64_t salt = 0; salt < salts; ++salt) {
    sketch_store store(64, salt, stream_mode::undirected);
    store.ingest({1, 2, 1.0, 0});
    store.ingest({2, 3, 1.0, 0});
    store.ingest({1, 3, 1.0, 0});
    louvain_engine engine(store, {});
    engine.apply_move(engine.unit_of(2), engine.community_of(engine.unit_of(1)));
    positive += engine.move_gain(engine.unit_of(3),
                                 engine.community_of(engine.unit_of(1))) > 0.0;
  }
  CHECK(positive >= static_cast<std::size_t>(0.95 * salts));
}

TEST_CASE("stale gain caches are rejected") {
  const auto store = two_triangle_store(32, 3);
  louvain_engine engine(store, {});
  const auto unit1 = engine.unit_of(1);
  const auto unit2 = engine.unit_of(2);
  const auto cache = engine.snapshot(unit2, engine.community_of(unit1));
  CHECK_NOTHROW((void)engine.estimate_gain(unit2, engine.community_of(unit1), cache));
  engine.apply_move(unit2, engine.community_of(unit1));
  CHECK_THROWS_AS((void)engine.estimate_gain(unit2, engine.community_of(unit1), cache),
                  stale_cache_error);
}

TEST_CASE("phase 1 makes no move when all neighbors are co-clustered") {
  const auto store = two_triangle_store(64, 11);
  louvain_engine engine(store, {});
  // pre-cluster each triangle
  engine.apply_move(engine.unit_of(2), engine.community_of(engine.unit_of(1)));
  engine.apply_move(engine.unit_of(3), engine.community_of(engine.unit_of(1)));
  engine.apply_move(engine.unit_of(5), engine.community_of(engine.unit_of(4)));
  engine.apply_move(engine.unit_of(6), engine.community_of(engine.unit_of(4)));
  CHECK(engine.run_phase1() == 0);
}

TEST_CASE("phase 1 pairs the two triangles in most salts") {
  std::size_t correct = 0;
  const std::size_t salts = 100;
  for (std::uint64_t salt = 0; salt < salts; ++salt) {
    const auto store = two_triangle_store(64, salt);
    louvain_engine engine(store, {0, 100, salt});
    engine.run_phase1();
    const auto part = engine.current_partition();
    correct += part.community_count() == 2 &&
               part.assignment.at(1) == part.assignment.at(2) &&
               part.assignment.at(1) == part.assignment.at(3) &&
               part.assignment.at(4) == part.assignment.at(5) &&
               part.assignment.at(4) == part.assignment.at(6);
  }
  CHECK(correct >= static_cast<std::size_t>(0.95 * salts));
}

TEST_CASE("coarsening the singleton partition changes nothing") {
  const auto store = two_triangle_store(32, 5);
  louvain_engine engine(store, {});
  CHECK_FALSE(engine.coarsen());  // every unit still its own community
  CHECK(engine.unit_count() == 6);
}

TEST_CASE("coarsening everything into one community folds all sketches") {
  const auto store = two_triangle_store(32, 6);
  louvain_engine engine(store, {});
  const auto target = engine.community_of(engine.unit_of(1));
  for (node_id v = 2; v <= 6; ++v) {
    engine.apply_move(engine.unit_of(v), target);
  }
  REQUIRE(engine.coarsen());
  CHECK(engine.unit_count() == 1);
  CHECK(engine.level() == 1);
  // every sampled edge is internal now, so phase 1 has nothing to do
  CHECK(engine.run_phase1() == 0);

  std::vector<node_id> all{1, 2, 3, 4, 5, 6};
  const auto folded = super_node(store, all);
  const auto part = engine.current_partition();
  CHECK(part.community_count() == 1);
  CHECK(internal_fraction(folded).value == 1.0);
}

TEST_CASE("two coarsened triangles show no estimated inter-community degree") {
  const auto store = two_triangle_store(64, 21);
  louvain_engine engine(store, {0, 100, 21});
  engine.run_phase1();
  if (engine.coarsen()) {
    // disconnected components: no sampled edge can cross, so no candidates
    for (std::uint32_t u = 0; u < engine.unit_count(); ++u) {
      for (std::uint32_t c = 0; c < engine.unit_count(); ++c) {
        if (c != engine.community_of(u)) {
          CHECK(engine.move_gain(u, c) <= 0.0);
        }
      }
    }
  }
}

TEST_CASE("louvain on an edgeless store reports no data") {
  sketch_store store(16, 0, stream_mode::undirected);
  CHECK_THROWS_AS((void)louvain(store, {}), no_data_error);
}

TEST_CASE("louvain refuses directed stores") {
  sketch_store store(16, 0, stream_mode::directed);
  store.ingest({1, 2, 1.0, 0});
  CHECK_THROWS_AS((void)louvain(store, {}), unsupported_error);
}

TEST_CASE("louvain separates two disjoint triangles") {
  std::size_t correct = 0;
  std::vector<double> estimates;
  const std::size_t salts = 60;
  for (std::uint64_t salt = 0; salt < salts; ++salt) {
    const auto store = two_triangle_store(128, salt);
    const auto res = louvain(store, {20, 100, salt});
    if (res.part.community_count() == 2) {
      ++correct;
    }
    estimates.push_back(res.mod.value);
  }
  CHECK(correct >= static_cast<std::size_t>(0.95 * salts));
  // estimates cluster near the exact optimum 0.5 at m = 128
  CHECK(std::abs(mean(estimates) - 0.5) < 0.1);
}

TEST_CASE("louvain is deterministic per seed") {
  const auto store = two_triangle_store(64, 9);
  const auto a = louvain(store, {20, 100, 42});
  const auto b = louvain(store, {20, 100, 42});
  CHECK(a.part.assignment == b.part.assignment);
  CHECK(a.mod.value == b.mod.value);
}

TEST_CASE("flattened partitions stay valid and caches refresh consistently") {
  const auto sbm = sbm_generate({120, 4, 0.3, 0.03, false, 17});
  sketch_store store(64, 4, stream_mode::undirected);
  store.ingest_stream(sbm.stream);
  auto res = louvain(store, {20, 100, 7});

  CHECK(res.part.assignment.size() == store.node_count());
  res.part.refresh(store);
  for (const auto& [label, info] : res.part.communities) {
    (void)label;
    double vol = 0.0;
    for (node_id v : info.members) {
      vol += estimate_degree(store.at(v)).value;
    }
    CHECK(info.volume_hat == doctest::Approx(vol));
  }
}

TEST_CASE("whole-graph partition scores near zero") {
  std::vector<double> estimates;
  for (std::uint64_t salt = 0; salt < 400; ++salt) {
    const auto store = two_triangle_store(64, salt);
    partition p;
    for (node_id v = 1; v <= 6; ++v) {
      p.assignment.emplace(v, 0);
    }
    estimates.push_back(estimate_modularity(store, p).value);
  }
  // exact value is 1 - 1 = 0; the estimator concentrates near it
  CHECK(std::abs(mean(estimates)) < 0.05);
}

TEST_CASE("modularity estimator concentrates on the true triangle split") {
  const std::uint32_t m = 64;
  std::vector<double> estimates;
  for (std::uint64_t salt = 0; salt < 1000; ++salt) {
    const auto store = two_triangle_store(m, salt);
    const std::uint32_t split[] = {0, 0, 0, 1, 1, 1};
    estimates.push_back(estimate_modularity(store, partition_from_labels(split)).value);
  }
  // bias tolerance scale 0.24/sqrt(m) plus Monte Carlo slack
  const double tolerance = 0.24 / std::sqrt(static_cast<double>(m)) + 3.0 * se_of_mean(estimates);
  CHECK(std::abs(mean(estimates) - 0.5) < tolerance);
}

TEST_CASE("modularity estimate is reproducible from its stored terms") {
  const auto store = two_triangle_store(64, 77);
  const std::uint32_t split[] = {0, 0, 0, 1, 1, 1};
  const auto est = estimate_modularity(store, partition_from_labels(split));
  double vol_v = 0.0;
  for (const auto& [e_hat, vol_hat] : est.per_community_terms) {
    (void)e_hat;
    vol_v += vol_hat;
  }
  double value = 0.0;
  for (const auto& [e_hat, vol_hat] : est.per_community_terms) {
    value += e_hat / est.e_v_hat - (vol_hat / vol_v) * (vol_hat / vol_v);
  }
  CHECK(value == doctest::Approx(est.value));
}

TEST_CASE("modularity estimator tracks the oracle on the desk SBM ground truth") {
  const auto sbm = sbm_generate({120, 4, 0.4, 0.02, false, 23});
  const auto gt = ground_truth_partition(sbm.graph);
  const double truth = exact_modularity(sbm.graph, gt);
  std::vector<double> estimates;
  for (std::uint64_t salt = 0; salt < 200; ++salt) {
    sketch_store store(64, salt, stream_mode::undirected);
    store.ingest_stream(sbm.stream);
    estimates.push_back(estimate_modularity(store, gt).value);
  }
  CHECK(std::abs(mean(estimates) - truth) < 3.0 * se_of_mean(estimates) + 0.01);
}

TEST_CASE("split-half rejects odd or tiny m") {
  CHECK_THROWS_AS((void)split_half_modularity(two_triangle_store(15, 0), {}),
                  invalid_config_error);
  CHECK_THROWS_AS((void)split_half_modularity(two_triangle_store(4, 0), {}),
                  invalid_config_error);
}

TEST_CASE("split-half equals the average of the two cross evaluations") {
  const auto store = two_triangle_store(128, 5);
  const auto res = split_half_modularity(store, {20, 100, 5});
  CHECK(res.estimate == doctest::Approx((res.eval_a_on_b.value + res.eval_b_on_a.value) / 2.0));

  // both halves recover the triangle split here, so re-evaluating the
  // returned partition on the second half reproduces eval_a_on_b
  const auto half_b = store.slice_positions(64, 128);
  CHECK(estimate_modularity(half_b, res.part).value == doctest::Approx(res.eval_a_on_b.value));
}

TEST_CASE("split-half lands near the exact optimum for the two triangles") {
  std::vector<double> estimates;
  for (std::uint64_t salt = 0; salt < 40; ++salt) {
    const auto store = two_triangle_store(128, salt);
    estimates.push_back(split_half_modularity(store, {20, 100, salt}).estimate);
  }
  CHECK(std::abs(mean(estimates) - 0.5) < 0.1);
}

TEST_CASE("exact-gain moves strictly increase exact modularity") {
  const auto sbm = sbm_generate({40, 3, 0.4, 0.05, false, 9});
  exact_louvain oracle(sbm.graph, 12);
  oracle.run_phase1();

  // replay the accepted moves; each must raise the exact modularity
  std::map<node_id, std::uint64_t> labels;
  for (node_id u = 1; u <= 40; ++u) {
    if (!sbm.graph.neighbors(u).empty()) {
      labels[u] = u;  // singleton start, label = node id
    }
  }
  std::vector<node_id> unit_nodes;  // unit index -> node id, construction order
  for (const auto& [u, l] : labels) {
    (void)l;
    unit_nodes.push_back(u);
  }
  auto as_partition = [&]() {
    partition p;
    for (const auto& [u, l] : labels) {
      p.assignment.emplace(u, l);
    }
    return p;
  };
  double current = exact_modularity(sbm.graph, as_partition());
  for (const auto& mv : oracle.move_log()) {
    labels[unit_nodes[mv.unit]] = unit_nodes[mv.to];
    const double next = exact_modularity(sbm.graph, as_partition());
    CHECK(next > current);
    current = next;
  }
}

TEST_CASE("sketch engine reproduces the exact engine's accepted moves at m=256") {
  // fixed 6-node graph with distinct weights so no exact gain ties
  std::vector<weighted_edge> edges{{1, 2, 2.0, 0}, {2, 3, 1.5, 0}, {1, 3, 1.0, 0},
                                   {4, 5, 2.2, 0}, {5, 6, 1.4, 0}, {4, 6, 0.9, 0},
                                   {3, 4, 0.1, 0}};
  oracle_graph g(6);
  for (const auto& e : edges) {
    g.add_edge(e.u, e.v, e.weight);
  }

  std::size_t identical = 0;
  const std::size_t salts = 50;
  for (std::uint64_t salt = 0; salt < salts; ++salt) {
    exact_louvain oracle(g, 1234);
    oracle.run_phase1();

    sketch_store store(256, salt, stream_mode::undirected);
    store.ingest_stream(edges);
    louvain_engine engine(store, {20, 100, 1234});
    engine.run_phase1();

    const auto& a = oracle.move_log();
    const auto& b = engine.move_log();
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) {
      same = a[i].unit == b[i].unit && a[i].from == b[i].from && a[i].to == b[i].to;
    }
    identical += same;
  }
  CHECK(identical >= static_cast<std::size_t>(0.9 * salts));
}
