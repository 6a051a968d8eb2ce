#include <algorithm>
#include <random>
#include <tuple>

#include "autoheal/topology.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace autoheal;

TEST_SUITE("topology") {

TEST_CASE("bipartite fabric link counts") {
  FabricSpec spec;
  spec.superspines = 0;
  spec.spines = 2;
  spec.leaves = 4;
  CHECK(build_spine_leaf(spec).link_count() == 8);

  spec.spines = 1;
  spec.leaves = 1;
  spec.hosts = 1;
  const auto g = build_spine_leaf(spec);
  CHECK(g.link_count() == 1);
  CHECK(validate_graph(g).connected);
}

TEST_CASE("link count property over random specs") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> d(1, 6), s(0, 3);
  for (int i = 0; i < 100; ++i) {
    FabricSpec spec;
    spec.superspines = s(rng);
    spec.spines = d(rng);
    spec.leaves = d(rng);
    spec.hosts = d(rng);
    const auto g = build_spine_leaf(spec);
    const auto want = static_cast<std::size_t>(spec.spines * spec.leaves + spec.superspines * spec.spines);
    CHECK(g.link_count() == want);
    CHECK(validate_graph(g).ok());
  }
}

TEST_CASE("wpp preset") {
  const auto g = load_topology("wpp");
  CHECK(g.switch_count() == 40);
  CHECK(g.link_count() == 78);
  CHECK(g.hosts().size() == 60);
  CHECK(validate_graph(g).ok());
}

TEST_CASE("invalid specs") {
  FabricSpec spec;
  spec.spines = 0;
  CHECK_THROWS_AS(build_spine_leaf(spec), InvalidSpec);
  spec = {};
  spec.leaves = -1;
  CHECK_THROWS_AS(build_spine_leaf(spec), InvalidSpec);
  spec = {};
  spec.capacity_bps = 0.0;
  CHECK_THROWS_AS(build_spine_leaf(spec), InvalidSpec);
  CHECK_THROWS_AS(load_topology("nope"), InvalidSpec);
}

TEST_CASE("triangle paths") {
  const auto g = fixtures::make_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
  const auto paths = k_shortest_paths(g, 0, 2, 2);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0] == Path{0, 2});
  CHECK(paths[1] == Path{0, 1, 2});
  CHECK_THROWS(k_shortest_paths(g, 0, 0, 2));
}

TEST_CASE("unreachable pair gives no paths") {
  const auto g = fixtures::make_graph(3, {{0, 1, 1.0}});
  CHECK(k_shortest_paths(g, 0, 2, 4).empty());
}

TEST_CASE("two spines three leaves") {
  FabricSpec spec;
  spec.spines = 2;
  spec.leaves = 3;
  spec.hosts = 3;
  const auto g = build_spine_leaf(spec);
  const auto leaves = g.switches_in_tier(Tier::Leaf);
  const auto paths = k_shortest_paths(g, leaves[0], leaves[1], 4);
  // Every simple path, ranked by hops; only the two-hop ones cross a single spine.
  const auto all = fixtures::all_simple_paths(g, leaves[0], leaves[1]);
  std::size_t shortest = 0;
  for (const auto& p : all) shortest += p.size() == 3;
  CHECK(shortest == 2);
  REQUIRE(paths.size() >= 2);
  CHECK(paths[0].size() == 3);
  CHECK(paths[1].size() == 3);
  CHECK(paths[0][1] != paths[1][1]);
}

TEST_CASE("k shortest paths match exhaustive enumeration") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> nd(2, 8), kd(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = nd(rng);
    const auto g = fixtures::random_graph(n, 0.45, rng);
    const auto k = kd(rng);
    for (SwitchId s = 0; s < n; ++s) {
      for (SwitchId t = 0; t < n; ++t) {
        if (s == t) continue;
        auto all = fixtures::all_simple_paths(g, s, t);
        auto key = [&](const Path& p) { return std::tuple(p.size(), g.path_propagation(p), p); };
        std::sort(all.begin(), all.end(), [&](const Path& a, const Path& b) { return key(a) < key(b); });
        if (all.size() > k) all.resize(k);
        CHECK(k_shortest_paths(g, s, t, k) == all);
      }
    }
  }
}

TEST_CASE("validation findings") {
  auto isolated = fixtures::make_graph(3, {{0, 1, 1.0}});
  const auto r1 = validate_graph(isolated);
  CHECK_FALSE(r1.connected);
  CHECK_FALSE(r1.ok());

  const auto zero = fixtures::make_graph(2, {{0, 1, 1.0}}, 0.0);
  const auto r2 = validate_graph(zero);
  CHECK_FALSE(r2.capacities_positive);
  CHECK_FALSE(r2.findings.empty());
}

TEST_CASE("serialization is deterministic and round-trips") {
  const auto a = serialize_graph(build_spine_leaf(wpp_preset()));
  const auto b = serialize_graph(build_spine_leaf(wpp_preset()));
  CHECK(a == b);
  CHECK(serialize_graph(parse_graph(a)) == a);
}

TEST_CASE("path inventory") {
  const auto g = load_topology("small");
  const auto leaves = g.switches_in_tier(Tier::Leaf);
  const std::vector<PathInventory::Key> keys{{leaves[0], leaves[1]}};
  PathInventory inv(g, keys, 4);
  const auto paths = inv.paths(leaves[0], leaves[1]);
  CHECK(!paths.empty());
  CHECK(paths.size() <= 4);
  for (const auto& p : paths) {
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  }
  CHECK(std::is_sorted(paths.begin(), paths.end(),
                       [&](const Path& a, const Path& b) { return path_rank_less(g, a, b); }));
  CHECK(inv.paths(leaves[2], leaves[3]).empty());
}

}
