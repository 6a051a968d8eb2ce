#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "autoheal/topology.hpp"
#include "autoheal/traffic.hpp"

namespace autoheal {

class Simulator;

/// Minimum-weight path; ties go to the lexicographically smallest switch
/// sequence. `weights` is indexed by link id. nullopt when unreachable.
std::optional<Path> dijkstra(const NetworkGraph& g, SwitchId src, SwitchId dst, std::span<const double> weights);

/// Every minimum-weight path (up to `limit`), lexicographically sorted.
std::vector<Path> equal_cost_paths(const NetworkGraph& g, SwitchId src, SwitchId dst, std::span<const double> weights,
                                   std::size_t limit = 64);

std::vector<double> propagation_weights(const NetworkGraph& g);

/// Propagation delay scaled by (1 + utilization) per link.
std::vector<double> inflated_weights(const NetworkGraph& g, std::span<const double> utilization);

std::uint64_t flow_hash(FlowId id);

/// Hashes each flow onto one of its leaf pair's equal-cost paths.
Routing ecmp_assign(const NetworkGraph& g, std::span<const FlowSpec> flows, std::span<const double> weights);
Routing ecmp_assign(const NetworkGraph& g, std::span<const FlowSpec> flows);

/// Reactive shortest-path controller. A violation is noticed only after the
/// detection delay; routes are then recomputed with propagation weights
/// inflated by current utilization. Thermal state is ignored.
class BaselineController {
 public:
  explicit BaselineController(double detection_delay_s = 2.0) : delay_(detection_delay_s) {}

  void on_tick(Simulator& sim);
  /// Violation-to-recomputation time of every reaction.
  const std::vector<double>& reactions() const { return reactions_; }
  double detection_delay() const { return delay_; }

 private:
  double delay_;
  std::optional<double> due_;
  double noticed_ = 0.0;
  std::vector<double> reactions_;
};

}  // namespace autoheal
