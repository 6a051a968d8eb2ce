#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "autoheal/topology.hpp"

namespace fixtures {

using namespace autoheal;

/// Switches 0..n-1 joined by the listed (a, b, delay) edges, one host per switch.
struct Edge {
  SwitchId a, b;
  double delay;
};

inline NetworkGraph make_graph(std::size_t n, const std::vector<Edge>& edges, double capacity = 1e9) {
  std::vector<Switch> sw;
  for (std::size_t i = 0; i < n; ++i)
    sw.push_back({static_cast<SwitchId>(i), "s" + std::to_string(i), Tier::Leaf});
  std::vector<Link> links;
  for (const auto& e : edges)
    links.push_back({static_cast<LinkId>(links.size()), e.a, e.b, capacity, e.delay});
  std::vector<Host> hosts;
  for (std::size_t i = 0; i < n; ++i)
    hosts.push_back({static_cast<HostId>(i), "h" + std::to_string(i), HostRole::Ldaq, static_cast<SwitchId>(i)});
  return NetworkGraph(std::move(sw), std::move(links), std::move(hosts));
}

/// Random simple graph on n switches with integer delays in [1, 4].
inline NetworkGraph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(p);
  std::uniform_int_distribution<int> d(1, 4);
  std::vector<Edge> edges;
  for (SwitchId a = 0; a < n; ++a)
    for (SwitchId b = a + 1; b < n; ++b)
      if (keep(rng)) edges.push_back({a, b, static_cast<double>(d(rng))});
  return make_graph(n, edges);
}

/// Every simple path from src to dst by plain DFS.
inline void all_simple_paths(const NetworkGraph& g, SwitchId at, SwitchId dst, std::vector<char>& seen, Path& cur,
                             std::vector<Path>& out) {
  if (at == dst) {
    out.push_back(cur);
    return;
  }
  for (const auto& adj : g.neighbors(at)) {
    if (seen[adj.to]) continue;
    seen[adj.to] = 1;
    cur.push_back(adj.to);
    all_simple_paths(g, adj.to, dst, seen, cur, out);
    cur.pop_back();
    seen[adj.to] = 0;
  }
}

inline std::vector<Path> all_simple_paths(const NetworkGraph& g, SwitchId src, SwitchId dst) {
  std::vector<char> seen(g.switch_count(), 0);
  seen[src] = 1;
  Path cur{src};
  std::vector<Path> out;
  all_simple_paths(g, src, dst, seen, cur, out);
  return out;
}

}  // namespace fixtures
