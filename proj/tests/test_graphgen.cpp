#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "esk/graphgen.hpp"
#include "esk/rng.hpp"

using namespace esk;

TEST_CASE("sbm rejects bad configurations") {
  CHECK_THROWS_AS((void)sbm_generate({0, 1, 0.5, 0.1, false, 0}), invalid_config_error);
  CHECK_THROWS_AS((void)sbm_generate({10, 0, 0.5, 0.1, false, 0}), invalid_config_error);
  CHECK_THROWS_AS((void)sbm_generate({10, 2, 0.1, 0.5, false, 0}), invalid_config_error);  // q > p
  CHECK_THROWS_AS((void)sbm_generate({10, 2, 1.5, 0.1, false, 0}), invalid_config_error);
}

TEST_CASE("p = q = 0 generates no edges") {
  const auto out = sbm_generate({50, 5, 0.0, 0.0, false, 1});
  CHECK(out.stream.empty());
  CHECK(out.graph.edge_count() == 0);
}

TEST_CASE("p=1, q=0, b=2, n=4 forces two disjoint pairs") {
  const auto out = sbm_generate({4, 2, 1.0, 0.0, false, 7});
  REQUIRE(out.stream.size() == 2);
  // round-robin blocks: {1,3} and {2,4}
  std::set<std::pair<node_id, node_id>> pairs;
  for (const auto& e : out.stream) {
    pairs.emplace(std::min(e.u, e.v), std::max(e.u, e.v));
    CHECK(e.weight > 0.0);
  }
  CHECK(pairs == std::set<std::pair<node_id, node_id>>{{1, 3}, {2, 4}});
}

TEST_CASE("generation is deterministic per seed") {
  const sbm_config cfg{100, 4, 0.2, 0.03, false, 99};
  const auto a = sbm_generate(cfg);
  const auto b = sbm_generate(cfg);
  REQUIRE(a.stream.size() == b.stream.size());
  for (std::size_t i = 0; i < a.stream.size(); ++i) {
    CHECK(a.stream[i].u == b.stream[i].u);
    CHECK(a.stream[i].v == b.stream[i].v);
    CHECK(a.stream[i].weight == b.stream[i].weight);
  }
  const auto c = sbm_generate({100, 4, 0.2, 0.03, false, 100});
  CHECK(a.stream.size() != c.stream.size());  // different draw sequence
}

TEST_CASE("desk SBM edge count sits within four sigma of its expectation") {
  const sbm_config cfg{200, 4, 0.3, 0.02, false, 5};
  const auto out = sbm_generate(cfg);
  const double expected = expected_sbm_edges(cfg);
  // per-pair Bernoulli: variance <= expectation
  const double sigma = std::sqrt(expected);
  CHECK(std::abs(static_cast<double>(out.stream.size()) - expected) < 4.0 * sigma);
}

TEST_CASE("expected edge count closed form") {
  // large-scale reference point: ~2.85e8 edges
  const double big = expected_sbm_edges({100'000, 10, 0.3, 0.03, false, 0});
  CHECK(big == doctest::Approx(284'985'000.0));
  CHECK(big == doctest::Approx(2.85e8).epsilon(0.001));

  // p = q degenerates to a G(n, p) expectation
  const double er = expected_sbm_edges({1000, 7, 0.1, 0.1, false, 0});
  CHECK(er == doctest::Approx(1000.0 * 999.0 / 2.0 * 0.1));

  CHECK(expected_sbm_edges({10, 2, 1.0, 0.0, false, 0}) == doctest::Approx(20.0));
}

TEST_CASE("oracle internal statistics on a triangle") {
  oracle_graph g(3);
  g.add_edge(1, 2, 1.0);
  g.add_edge(2, 3, 1.0);
  g.add_edge(1, 3, 1.0);
  const std::vector<node_id> all{1, 2, 3};
  CHECK(g.volume(all) == doctest::Approx(6.0));
  const auto st = g.internal(all);
  CHECK(st.e == doctest::Approx(3.0));
  CHECK(st.w == doctest::Approx(3.0));
  CHECK(st.p == doctest::Approx(1.0));

  const auto none = g.internal(std::vector<node_id>{});
  CHECK(none.e == 0.0);
  CHECK(none.w == 0.0);
  CHECK(none.p == 0.0);
  CHECK(g.volume(std::vector<node_id>{}) == 0.0);
}

TEST_CASE("w(C) = vol(C) - e(C) on loop-free graphs") {
  const auto out = sbm_generate({50, 3, 0.25, 0.05, false, 13});
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<node_id> c;
    for (node_id u = 1; u <= 50; ++u) {
      if (bounded(rng, 2) == 0) {
        c.push_back(u);
      }
    }
    const auto st = out.graph.internal(c);
    CHECK(st.w == doctest::Approx(out.graph.volume(c) - st.e));
  }
}

TEST_CASE("degrees sum to twice the total edge weight") {
  const auto out = sbm_generate({80, 4, 0.2, 0.04, false, 3});
  double sum = 0.0;
  for (node_id u = 1; u <= 80; ++u) {
    sum += out.graph.degree(u);
  }
  CHECK(sum == doctest::Approx(2.0 * out.graph.total_edge_weight()));
}

TEST_CASE("co-rating: one user rating three items") {
  const std::vector<rating> rs{{9, 1}, {9, 2}, {9, 3}};
  const auto tagged = corate_tagged(rs);
  REQUIRE(tagged.size() == 3);
  for (const auto& e : tagged) {
    CHECK(e.weight == 1.0);
    CHECK(e.tag == 9);
  }
  const auto agg = corate_aggregate(rs);
  REQUIRE(agg.size() == 3);
  for (const auto& e : agg) {
    CHECK(e.weight == 1.0);
  }
}

TEST_CASE("co-rating: two users rating the same pair accumulate weight 2") {
  const std::vector<rating> rs{{1, 10}, {1, 20}, {2, 10}, {2, 20}};
  const auto agg = corate_aggregate(rs);
  REQUIRE(agg.size() == 1);
  CHECK(agg[0].u == 10);
  CHECK(agg[0].v == 20);
  CHECK(agg[0].weight == doctest::Approx(2.0));
}

TEST_CASE("ungrouped co-rating input is rejected") {
  const std::vector<rating> rs{{1, 10}, {2, 20}, {1, 30}};
  CHECK_THROWS_AS((void)corate_aggregate(rs), parse_error);
  CHECK_THROWS_AS((void)corate_tagged(rs), parse_error);
}

TEST_CASE("aggregated weights equal per-pair tag multiplicities on a desk sample") {
  // 100 users, up to 500 items, random ratings
  std::mt19937_64 rng(2718);
  std::vector<rating> rs;
  for (std::uint64_t user = 1; user <= 100; ++user) {
    const std::uint64_t count = 2 + bounded(rng, 8);
    std::set<std::uint64_t> items;
    while (items.size() < count) {
      items.insert(1 + bounded(rng, 500));
    }
    for (std::uint64_t item : items) {
      rs.push_back({user, item});
    }
  }

  // independent counting oracle over the tagged stream
  const auto tagged = corate_tagged(rs);
  std::map<std::pair<node_id, node_id>, double> counted;
  for (const auto& e : tagged) {
    counted[{std::min(e.u, e.v), std::max(e.u, e.v)}] += e.weight;
  }
  const auto agg = corate_aggregate(rs);
  REQUIRE(agg.size() == counted.size());
  for (const auto& e : agg) {
    CHECK(counted.at({e.u, e.v}) == doctest::Approx(e.weight));
  }
}
