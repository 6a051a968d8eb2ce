#include "autoheal/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

#include "autoheal/simulator.hpp"

namespace autoheal {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> distances(const NetworkGraph& g, SwitchId from, std::span<const double> w) {
  std::vector<double> dist(g.switch_count(), kInf);
  using Item = std::pair<double, SwitchId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[from] = 0.0;
  pq.push({0.0, from});
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (const auto& a : g.neighbors(u)) {
      const double nd = d + w[a.link];
      if (nd < dist[a.to]) {
        dist[a.to] = nd;
        pq.push({nd, a.to});
      }
    }
  }
  return dist;
}

void check_weights(const NetworkGraph& g, std::span<const double> w) {
  if (w.size() != g.link_count()) throw std::invalid_argument("one weight per link required");
  for (double x : w)
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("weights must be finite and non-negative");
}

struct ShortestDag {
  std::vector<double> from_src, to_dst;
  double total;
  double tol;
};

std::optional<ShortestDag> shortest_dag(const NetworkGraph& g, SwitchId src, SwitchId dst, std::span<const double> w) {
  check_weights(g, w);
  if (src >= g.switch_count() || dst >= g.switch_count()) throw std::out_of_range("switch id out of range");
  ShortestDag dag{distances(g, src, w), distances(g, dst, w), 0.0, 0.0};
  dag.total = dag.from_src[dst];
  if (!std::isfinite(dag.total)) return std::nullopt;
  dag.tol = 1e-9 * std::max(dag.total, 1e-12);
  return dag;
}

bool on_dag(const ShortestDag& dag, SwitchId u, const Adjacent& a, std::span<const double> w) {
  return std::abs(dag.from_src[u] + w[a.link] + dag.to_dst[a.to] - dag.total) <= dag.tol;
}

}  // namespace

std::optional<Path> dijkstra(const NetworkGraph& g, SwitchId src, SwitchId dst, std::span<const double> weights) {
  auto dag = shortest_dag(g, src, dst, weights);
  if (!dag) return std::nullopt;
  Path path{src};
  std::vector<char> used(g.switch_count(), 0);
  used[src] = 1;
  while (path.back() != dst) {
    const auto u = path.back();
    bool moved = false;
    for (const auto& a : g.neighbors(u)) {  // ascending id
      if (used[a.to] || !on_dag(*dag, u, a, weights)) continue;
      path.push_back(a.to);
      used[a.to] = 1;
      moved = true;
      break;
    }
    if (!moved) {
      // Only reachable with zero-weight cycles; fall back to enumeration.
      auto all = equal_cost_paths(g, src, dst, weights, 1);
      if (all.empty()) return std::nullopt;
      return all.front();
    }
  }
  return path;
}

std::vector<Path> equal_cost_paths(const NetworkGraph& g, SwitchId src, SwitchId dst, std::span<const double> weights,
                                   std::size_t limit) {
  auto dag = shortest_dag(g, src, dst, weights);
  std::vector<Path> out;
  if (!dag || limit == 0) return out;
  Path path{src};
  std::vector<char> used(g.switch_count(), 0);
  used[src] = 1;
  std::function<void(SwitchId)> walk = [&](SwitchId u) {
    if (out.size() >= limit) return;
    if (u == dst) {
      out.push_back(path);
      return;
    }
    for (const auto& a : g.neighbors(u)) {
      if (used[a.to] || !on_dag(*dag, u, a, weights)) continue;
      used[a.to] = 1;
      path.push_back(a.to);
      walk(a.to);
      path.pop_back();
      used[a.to] = 0;
    }
  };
  walk(src);
  return out;  // DFS over ascending neighbours already yields lexicographic order
}

std::vector<double> propagation_weights(const NetworkGraph& g) {
  std::vector<double> w(g.link_count());
  for (const auto& l : g.links()) w[l.id] = l.delay_s;
  return w;
}

std::vector<double> inflated_weights(const NetworkGraph& g, std::span<const double> utilization) {
  auto w = propagation_weights(g);
  for (std::size_t l = 0; l < w.size() && l < utilization.size(); ++l) w[l] *= 1.0 + utilization[l];
  return w;
}

std::uint64_t flow_hash(FlowId id) {
  // splitmix64 finalizer
  std::uint64_t z = static_cast<std::uint64_t>(id) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Routing ecmp_assign(const NetworkGraph& g, std::span<const FlowSpec> flows, std::span<const double> weights) {
  std::map<std::pair<SwitchId, SwitchId>, std::vector<Path>> cache;
  Routing r;
  r.flow_paths.resize(flows.size());
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const auto& f = flows[i];
    const SwitchId s = g.hosts().at(f.src).leaf, d = g.hosts().at(f.dst).leaf;
    if (s == d) {
      r.flow_paths[i] = {s};
      continue;
    }
    auto it = cache.find({s, d});
    if (it == cache.end()) it = cache.emplace(std::pair{s, d}, equal_cost_paths(g, s, d, weights)).first;
    if (it->second.empty()) throw MissingRoute("no path between leaves of flow " + std::to_string(f.id));
    r.flow_paths[i] = it->second[flow_hash(f.id) % it->second.size()];
  }
  return r;
}

Routing ecmp_assign(const NetworkGraph& g, std::span<const FlowSpec> flows) {
  return ecmp_assign(g, flows, propagation_weights(g));
}

void BaselineController::on_tick(Simulator& sim) {
  const double t = sim.now();
  if (due_ && t + 1e-12 >= *due_) {
    const auto& g = sim.graph();
    const auto w = inflated_weights(g, sim.traffic().link_utilization);
    sim.set_routing(ecmp_assign(g, sim.roster().flows, w));
    reactions_.push_back(t - noticed_);
    due_.reset();
    return;
  }
  if (!due_ && sim.violations().trigger) {
    noticed_ = t;
    due_ = t + delay_;
  }
}

}  // namespace autoheal
