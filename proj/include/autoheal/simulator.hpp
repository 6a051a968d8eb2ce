#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "autoheal/actuation.hpp"
#include "autoheal/knowledge.hpp"
#include "autoheal/thermal.hpp"
#include "autoheal/topology.hpp"
#include "autoheal/traffic.hpp"

namespace autoheal {

struct SimConfig {
  double tick_s = 1e-3;
  QoSIntents intents;
  ThermalParams thermal;
  InternalModel thermal_mode = InternalModel::FirstOrderCorrected;
  double loss_per_degree = kDefaultThermalLossPerDegree;
  double throttle_factor = 0.5;
  NormalizationBounds bounds;
  double p_rack = 0.5;
  double env_c = 22.0;
  double c_hvac = 1.0;
};

/// Per-tick aggregate outcome.
struct TickSample {
  double t = 0.0;
  double offered_bps = 0.0;    // after throttling
  double demand_bps = 0.0;     // before throttling
  double delivered_bps = 0.0;
  double mean_latency_s = 0.0;  // over monitored pairs
  double max_latency_s = 0.0;
  double max_utilization = 0.0;
  bool violated = false;
  bool throttled = false;
};

/// Fluid-model network with thermal dynamics and delayed rule installation.
/// Time advances in fixed ticks; traffic state is recomputed only when
/// routing, throttling or flash activity change.
class Simulator {
 public:
  Simulator(const NetworkGraph& g, FlowRoster roster, Routing routing, FlashProcess flash, SimConfig cfg);

  /// Integrates thermal state over one tick, advances time, applies due
  /// actuation events and refreshes the observation.
  void step();

  double now() const { return t_; }
  std::uint64_t tick() const { return tick_; }
  const NetworkGraph& graph() const { return *g_; }
  const FlowRoster& roster() const { return roster_; }
  const Routing& routing() const { return routing_; }
  const SimConfig& config() const { return cfg_; }
  const TrafficMatrix& traffic() const { return tm_; }
  const ThermalState& thermal() const { return thermal_; }
  ThermalState& thermal_mut() { return thermal_; }
  const ViolationReport& violations() const { return report_; }
  const TickSample& sample() const { return sample_; }
  const std::vector<double>& switch_utilization() const { return switch_u_; }
  const ClassScale& class_scale() const { return scale_; }
  bool throttled() const;
  std::size_t clamp_warnings() const { return clamp_warnings_; }

  NetworkState observe() const;
  std::vector<double> normalized_observation() const;
  /// Mean normalized monitored-pair latency and mean normalized utilization
  /// over the links those pairs currently use.
  std::pair<double, double> reward_terms() const;

  /// Leaf switch pair of a monitored pair.
  std::pair<SwitchId, SwitchId> pair_leaves(std::size_t pair) const;
  const std::vector<std::vector<LinkId>>& pair_links() const { return pair_links_; }

  /// Moves every flow between the two leaves of `pair` onto `path`.
  void reroute_pair(std::size_t pair, const Path& path);
  void set_routing(Routing routing);
  void throttle(ServiceClass c);
  void set_environment(double env_c, double c_hvac);

  void enqueue(ActuationEvent e);
  std::size_t pending() const { return pending_.size(); }
  /// Applied events, in application order.
  const std::vector<ActuationEvent>& applied() const { return applied_; }
  void set_apply_hook(std::function<void(const ActuationEvent&)> hook) { hook_ = std::move(hook); }

 private:
  void refresh();
  void apply(ActuationEvent& e);
  void update_switch_utilization();
  void update_report();
  bool violates(const TrafficMatrix& tm) const;

  const NetworkGraph* g_;
  FlowRoster roster_;
  Routing routing_;
  FlashProcess flash_;
  SimConfig cfg_;
  ThermalState thermal_;

  double t_ = 0.0;
  std::uint64_t tick_ = 0;
  bool dirty_ = true;
  bool flash_on_ = false;
  ClassScale scale_ = kNoThrottle;

  std::vector<double> offered_;
  double demand_bps_ = 0.0;
  TrafficMatrix tm_;
  std::vector<double> congestion_survival_;  // per flow
  std::vector<double> switch_u_;
  std::vector<std::vector<LinkId>> pair_links_;
  std::vector<std::vector<LinkId>> flow_links_;
  std::vector<double> excess_;
  bool thermal_loss_ = false;
  ViolationReport report_;
  TickSample sample_;
  std::size_t clamp_warnings_ = 0;

  std::deque<ActuationEvent> pending_;
  std::vector<ActuationEvent> applied_;
  std::function<void(const ActuationEvent&)> hook_;
};

}  // namespace autoheal
