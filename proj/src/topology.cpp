#include "autoheal/topology.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

namespace autoheal {

using nlohmann::json;

std::string_view to_string(Tier tier) {
  switch (tier) {
    case Tier::SuperSpine: return "super-spine";
    case Tier::Spine: return "spine";
    case Tier::Leaf: return "leaf";
  }
  return "leaf";
}

std::string_view to_string(HostRole role) {
  switch (role) {
    case HostRole::Ldaq: return "LDAQ";
    case HostRole::Ecp: return "ECP";
    case HostRole::Mu: return "MU";
    case HostRole::Vied: return "vIED";
  }
  return "LDAQ";
}

Tier tier_from_string(std::string_view s) {
  if (s == "super-spine") return Tier::SuperSpine;
  if (s == "spine") return Tier::Spine;
  if (s == "leaf") return Tier::Leaf;
  throw InvalidSpec("unknown tier '" + std::string(s) + "'");
}

HostRole role_from_string(std::string_view s) {
  if (s == "LDAQ") return HostRole::Ldaq;
  if (s == "ECP") return HostRole::Ecp;
  if (s == "MU") return HostRole::Mu;
  if (s == "vIED") return HostRole::Vied;
  throw InvalidSpec("unknown host role '" + std::string(s) + "'");
}

NetworkGraph::NetworkGraph(std::vector<Switch> switches, std::vector<Link> links, std::vector<Host> hosts)
    : switches_(std::move(switches)), links_(std::move(links)), hosts_(std::move(hosts)) {
  const auto n = switches_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (switches_[i].id != i) throw InvalidSpec("switch ids must be dense and ordered");
  }
  adjacency_.assign(n, {});
  for (std::size_t i = 0; i < links_.size(); ++i) {
    auto& l = links_[i];
    if (l.id != i) throw InvalidSpec("link ids must be dense and ordered");
    if (l.a >= n || l.b >= n) throw InvalidSpec("link endpoint out of range");
    adjacency_[l.a].push_back({l.b, l.id});
    if (l.a != l.b) adjacency_[l.b].push_back({l.a, l.id});
  }
  for (auto& adj : adjacency_) {
    std::stable_sort(adj.begin(), adj.end(), [](const Adjacent& x, const Adjacent& y) { return x.to < y.to; });
  }
  for (std::size_t i = 0; i < hosts_.size(); ++i) {
    if (hosts_[i].id != i) throw InvalidSpec("host ids must be dense and ordered");
    if (hosts_[i].leaf >= n) throw InvalidSpec("host attached to unknown switch");
  }
}

std::optional<LinkId> NetworkGraph::link_between(SwitchId a, SwitchId b) const {
  if (a >= adjacency_.size()) return std::nullopt;
  for (const auto& adj : adjacency_[a]) {
    if (adj.to == b) return adj.link;
  }
  return std::nullopt;
}

std::vector<LinkId> NetworkGraph::path_links(const Path& path) const {
  std::vector<LinkId> out;
  if (path.size() < 2) return out;
  out.reserve(path.size() - 1);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    auto l = link_between(path[i], path[i + 1]);
    if (!l) throw InvalidSpec("path hop is not a link");
    out.push_back(*l);
  }
  return out;
}

double NetworkGraph::path_propagation(const Path& path) const {
  double total = 0.0;
  for (auto l : path_links(path)) total += links_[l].delay_s;
  return total;
}

std::vector<SwitchId> NetworkGraph::switches_in_tier(Tier tier) const {
  std::vector<SwitchId> out;
  for (const auto& s : switches_) {
    if (s.tier == tier) out.push_back(s.id);
  }
  return out;
}

NetworkGraph build_spine_leaf(const FabricSpec& spec) {
  if (spec.superspines < 0 || spec.spines < 1 || spec.leaves < 1 || spec.hosts < 1)
    throw InvalidSpec("fabric counts must be >= 1 (super-spines >= 0)");
  if (!(spec.capacity_bps > 0.0)) throw InvalidSpec("link capacity must be > 0");
  if (spec.delay_s < 0.0) throw InvalidSpec("propagation delay must be >= 0");

  std::vector<Switch> switches;
  std::vector<SwitchId> ss, sp, lf;
  auto add = [&](Tier tier, const std::string& prefix, int count, std::vector<SwitchId>& ids) {
    for (int i = 0; i < count; ++i) {
      const auto id = static_cast<SwitchId>(switches.size());
      switches.push_back({id, prefix + std::to_string(i + 1), tier});
      ids.push_back(id);
    }
  };
  add(Tier::SuperSpine, "ss", spec.superspines, ss);
  add(Tier::Spine, "sp", spec.spines, sp);
  add(Tier::Leaf, "lf", spec.leaves, lf);

  std::vector<Link> links;
  auto connect = [&](SwitchId a, SwitchId b) {
    links.push_back({static_cast<LinkId>(links.size()), a, b, spec.capacity_bps, spec.delay_s});
  };
  for (auto s : ss)
    for (auto p : sp) connect(s, p);
  for (auto p : sp)
    for (auto l : lf) connect(p, l);
  if (spec.tier_peer_links) {
    for (std::size_t i = 0; i + 1 < sp.size(); ++i) connect(sp[i], sp[i + 1]);
    for (std::size_t i = 0; i + 1 < ss.size(); ++i) connect(ss[i], ss[i + 1]);
  }

  static constexpr HostRole kRoles[] = {HostRole::Ldaq, HostRole::Ecp, HostRole::Mu, HostRole::Vied};
  std::vector<Host> hosts;
  for (int i = 0; i < spec.hosts; ++i) {
    const HostRole role = kRoles[i % 4];
    hosts.push_back({static_cast<HostId>(i), std::string(to_string(role)) + "-" + std::to_string(i + 1), role,
                     lf[static_cast<std::size_t>(i) % lf.size()]});
  }
  return NetworkGraph(std::move(switches), std::move(links), std::move(hosts));
}

FabricSpec wpp_preset() {
  FabricSpec spec;
  spec.superspines = 2;
  spec.spines = 2;
  spec.leaves = 36;
  spec.hosts = 60;
  spec.tier_peer_links = true;
  return spec;
}

FabricSpec small_preset() {
  FabricSpec spec;
  spec.superspines = 0;
  spec.spines = 2;
  spec.leaves = 4;
  spec.hosts = 8;
  return spec;
}

NetworkGraph load_topology(std::string_view name) {
  if (name == "wpp") return build_spine_leaf(wpp_preset());
  if (name == "small") return build_spine_leaf(small_preset());
  constexpr std::string_view kCustom = "custom:";
  if (name.starts_with(kCustom)) {
    const std::string path(name.substr(kCustom.size()));
    std::ifstream in(path);
    if (!in) throw InvalidSpec("cannot open topology file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
  }
  throw InvalidSpec("unknown topology '" + std::string(name) + "'");
}

bool path_rank_less(const NetworkGraph& g, const Path& lhs, const Path& rhs) {
  if (lhs.size() != rhs.size()) return lhs.size() < rhs.size();
  const double dl = g.path_propagation(lhs);
  const double dr = g.path_propagation(rhs);
  if (dl != dr) return dl < dr;
  return lhs < rhs;
}

namespace {

std::vector<std::size_t> hop_distances(const NetworkGraph& g, SwitchId from) {
  constexpr auto kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(g.switch_count(), kInf);
  std::queue<SwitchId> q;
  dist[from] = 0;
  q.push(from);
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (const auto& adj : g.neighbors(u)) {
      if (dist[adj.to] == kInf) {
        dist[adj.to] = dist[u] + 1;
        q.push(adj.to);
      }
    }
  }
  return dist;
}

void collect_paths(const NetworkGraph& g, SwitchId dst, std::size_t max_hops, const std::vector<std::size_t>& to_dst,
                   Path& current, std::vector<char>& on_path, std::vector<Path>& out) {
  const auto u = current.back();
  if (u == dst) {
    out.push_back(current);
    return;
  }
  const std::size_t hops = current.size() - 1;
  for (const auto& adj : g.neighbors(u)) {
    const auto v = adj.to;
    if (on_path[v] || to_dst[v] == std::numeric_limits<std::size_t>::max()) continue;
    if (hops + 1 + to_dst[v] > max_hops) continue;
    on_path[v] = 1;
    current.push_back(v);
    collect_paths(g, dst, max_hops, to_dst, current, on_path, out);
    current.pop_back();
    on_path[v] = 0;
  }
}

}  // namespace

std::vector<Path> k_shortest_paths(const NetworkGraph& g, SwitchId src, SwitchId dst, std::size_t k) {
  if (src >= g.switch_count() || dst >= g.switch_count()) throw std::out_of_range("switch id out of range");
  if (src == dst) throw std::invalid_argument("k_shortest_paths requires src != dst");
  if (k == 0) return {};
  const auto to_dst = hop_distances(g, dst);
  if (to_dst[src] == std::numeric_limits<std::size_t>::max()) return {};

  // Every path with fewer hops outranks every longer one, so growing the hop
  // budget until at least k paths exist yields the exact top-k.
  std::vector<Path> found;
  const std::size_t max_budget = g.switch_count() - 1;
  for (std::size_t budget = to_dst[src]; budget <= max_budget; ++budget) {
    found.clear();
    Path current{src};
    std::vector<char> on_path(g.switch_count(), 0);
    on_path[src] = 1;
    collect_paths(g, dst, budget, to_dst, current, on_path, found);
    if (found.size() >= k) break;
  }
  std::sort(found.begin(), found.end(), [&](const Path& a, const Path& b) { return path_rank_less(g, a, b); });
  if (found.size() > k) found.resize(k);
  return found;
}

PathInventory::PathInventory(const NetworkGraph& g, std::span<const Key> pairs, std::size_t k) : k_(k) {
  for (const auto& key : pairs) {
    if (key.first == key.second || paths_.contains(key)) continue;
    paths_.emplace(key, k_shortest_paths(g, key.first, key.second, k));
  }
}

std::span<const Path> PathInventory::paths(SwitchId src, SwitchId dst) const {
  auto it = paths_.find({src, dst});
  if (it == paths_.end()) return {};
  return it->second;
}

ValidationReport validate_graph(const NetworkGraph& g) {
  ValidationReport report;
  const auto n = g.switch_count();
  if (n == 0) {
    report.connected = false;
    report.findings.push_back("graph has no switches");
  } else {
    std::vector<char> seen(n, 0);
    std::vector<SwitchId> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (const auto& adj : g.neighbors(u)) {
        if (!seen[adj.to]) {
          seen[adj.to] = 1;
          stack.push_back(adj.to);
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!seen[i]) {
        report.connected = false;
        report.findings.push_back("switch " + g.switches()[i].name + " is not reachable");
      }
    }
  }
  std::set<std::pair<SwitchId, SwitchId>> pairs;
  for (const auto& l : g.links()) {
    if (!(l.capacity_bps > 0.0)) {
      report.capacities_positive = false;
      report.findings.push_back("link " + std::to_string(l.id) + " has non-positive capacity");
    }
    if (l.a == l.b) {
      report.no_self_loops = false;
      report.findings.push_back("link " + std::to_string(l.id) + " is a self-loop");
    }
    if (!pairs.insert(std::minmax(l.a, l.b)).second) {
      report.no_parallel_links = false;
      report.findings.push_back("link " + std::to_string(l.id) + " duplicates an existing switch pair");
    }
  }
  for (const auto& h : g.hosts()) {
    if (h.leaf >= n || g.switches()[h.leaf].tier != Tier::Leaf) {
      report.hosts_attached = false;
      report.findings.push_back("host " + h.name + " is not attached to a leaf switch");
    }
  }
  return report;
}

std::string serialize_graph(const NetworkGraph& g) {
  json doc;
  doc["switches"] = json::array();
  for (const auto& s : g.switches())
    doc["switches"].push_back({{"id", s.id}, {"name", s.name}, {"tier", to_string(s.tier)}});
  doc["links"] = json::array();
  for (const auto& l : g.links())
    doc["links"].push_back({{"id", l.id}, {"a", l.a}, {"b", l.b}, {"capacity_bps", l.capacity_bps},
                            {"delay_s", l.delay_s}});
  doc["hosts"] = json::array();
  for (const auto& h : g.hosts())
    doc["hosts"].push_back({{"id", h.id}, {"name", h.name}, {"role", to_string(h.role)}, {"leaf", h.leaf}});
  return doc.dump(2);
}

NetworkGraph parse_graph(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("topology JSON: ") + e.what());
  }
  try {
    std::vector<Switch> switches;
    for (const auto& s : doc.at("switches"))
      switches.push_back({s.at("id").get<SwitchId>(), s.at("name").get<std::string>(),
                          tier_from_string(s.at("tier").get<std::string>())});
    std::vector<Link> links;
    for (const auto& l : doc.at("links"))
      links.push_back({l.at("id").get<LinkId>(), l.at("a").get<SwitchId>(), l.at("b").get<SwitchId>(),
                       l.value("capacity_bps", 1e9), l.value("delay_s", 0.25e-3)});
    std::vector<Host> hosts;
    for (const auto& h : doc.value("hosts", json::array()))
      hosts.push_back({h.at("id").get<HostId>(), h.at("name").get<std::string>(),
                       role_from_string(h.at("role").get<std::string>()), h.at("leaf").get<SwitchId>()});
    return NetworkGraph(std::move(switches), std::move(links), std::move(hosts));
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("topology JSON: ") + e.what());
  }
}

}  // namespace autoheal
