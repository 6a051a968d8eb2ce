#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace autoheal {

using SwitchId = std::uint32_t;
using LinkId = std::uint32_t;
using HostId = std::uint32_t;
using Path = std::vector<SwitchId>;

enum class Tier { SuperSpine, Spine, Leaf };
enum class HostRole { Ldaq, Ecp, Mu, Vied };

std::string_view to_string(Tier tier);
std::string_view to_string(HostRole role);
Tier tier_from_string(std::string_view s);
HostRole role_from_string(std::string_view s);

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Switch {
  SwitchId id = 0;
  std::string name;
  Tier tier = Tier::Leaf;
};

/// Full-duplex link; each direction carries `capacity_bps` independently.
struct Link {
  LinkId id = 0;
  SwitchId a = 0;
  SwitchId b = 0;
  double capacity_bps = 1e9;
  double delay_s = 0.0;
};

struct Host {
  HostId id = 0;
  std::string name;
  HostRole role = HostRole::Ldaq;
  SwitchId leaf = 0;
};

struct Adjacent {
  SwitchId to;
  LinkId link;
};

/// Capacity-annotated switch fabric with hosts hanging off leaf switches.
/// Ids are dense indices into the respective vectors.
class NetworkGraph {
 public:
  NetworkGraph() = default;
  /// Throws InvalidSpec when an endpoint id is out of range; every other
  /// structural property is left to validate_graph().
  NetworkGraph(std::vector<Switch> switches, std::vector<Link> links, std::vector<Host> hosts);

  const std::vector<Switch>& switches() const { return switches_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Host>& hosts() const { return hosts_; }
  std::size_t switch_count() const { return switches_.size(); }
  std::size_t link_count() const { return links_.size(); }

  /// Neighbours sorted by switch id.
  std::span<const Adjacent> neighbors(SwitchId s) const { return adjacency_[s]; }
  std::optional<LinkId> link_between(SwitchId a, SwitchId b) const;
  /// Links traversed by a switch path, in order. Throws on a non-adjacent hop.
  std::vector<LinkId> path_links(const Path& path) const;
  double path_propagation(const Path& path) const;
  /// 0 when traversing link a->b, 1 for b->a.
  int direction(LinkId link, SwitchId from) const { return links_[link].a == from ? 0 : 1; }

  std::vector<SwitchId> switches_in_tier(Tier tier) const;

 private:
  std::vector<Switch> switches_;
  std::vector<Link> links_;
  std::vector<Host> hosts_;
  std::vector<std::vector<Adjacent>> adjacency_;
};

struct FabricSpec {
  int superspines = 0;  // 0 means no super-spine tier
  int spines = 2;
  int leaves = 4;
  int hosts = 8;        // attached round-robin over leaves
  double capacity_bps = 1e9;
  double delay_s = 0.25e-3;
  /// Chain consecutive switches inside the spine and super-spine tiers.
  bool tier_peer_links = false;
};

/// Full bipartite spine<->leaf and super-spine<->spine wiring.
NetworkGraph build_spine_leaf(const FabricSpec& spec);

/// 2 super-spines, 2 spines, 36 leaves, 60 hosts; 72 fabric links plus the
/// two tier peer links gives 78.
FabricSpec wpp_preset();
FabricSpec small_preset();

/// `wpp`, `small`, or `custom:<path to topology JSON>`.
NetworkGraph load_topology(std::string_view name);

/// Up to k simple paths ordered by hop count, then propagation delay, then
/// the lexicographic switch-id sequence. Unreachable pairs give an empty list.
std::vector<Path> k_shortest_paths(const NetworkGraph& g, SwitchId src, SwitchId dst, std::size_t k);

/// Strict weak order used for ranking candidate paths.
bool path_rank_less(const NetworkGraph& g, const Path& lhs, const Path& rhs);

class PathInventory {
 public:
  using Key = std::pair<SwitchId, SwitchId>;

  PathInventory() = default;
  PathInventory(const NetworkGraph& g, std::span<const Key> pairs, std::size_t k);

  /// Empty span for pairs that were never added.
  std::span<const Path> paths(SwitchId src, SwitchId dst) const;
  std::size_t k() const { return k_; }
  const std::map<Key, std::vector<Path>>& all() const { return paths_; }

 private:
  std::size_t k_ = 4;
  std::map<Key, std::vector<Path>> paths_;
};

struct ValidationReport {
  bool connected = true;
  bool capacities_positive = true;
  bool hosts_attached = true;
  bool no_self_loops = true;
  bool no_parallel_links = true;
  std::vector<std::string> findings;

  bool ok() const {
    return connected && capacities_positive && hosts_attached && no_self_loops && no_parallel_links;
  }
};

ValidationReport validate_graph(const NetworkGraph& g);

std::string serialize_graph(const NetworkGraph& g);
NetworkGraph parse_graph(std::string_view json_text);

}  // namespace autoheal
