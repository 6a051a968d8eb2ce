#include "autoheal/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace autoheal {

Simulator::Simulator(const NetworkGraph& g, FlowRoster roster, Routing routing, FlashProcess flash, SimConfig cfg)
    : g_(&g), roster_(std::move(roster)), routing_(std::move(routing)), flash_(std::move(flash)), cfg_(cfg) {
  cfg_.intents.validate();
  cfg_.thermal.validate();
  if (!(cfg_.tick_s > 0.0)) throw std::invalid_argument("tick must be positive");
  if (!(cfg_.throttle_factor > 0.0 && cfg_.throttle_factor < 1.0))
    throw std::invalid_argument("throttle factor must lie in (0,1)");
  if (routing_.flow_paths.size() != roster_.flows.size()) throw MissingRoute("routing does not cover every flow");
  excess_.assign(g.switch_count(), 0.0);
  thermal_ = make_thermal_state(g.switch_count(), cfg_.thermal, cfg_.env_c, cfg_.p_rack, cfg_.c_hvac);
  flash_on_ = flash_.active(0.0);
  refresh();
  for (std::size_t s = 0; s < g.switch_count(); ++s) {
    const auto ss = steady_state(cfg_.thermal, cfg_.env_c, cfg_.p_rack, cfg_.c_hvac, std::clamp(switch_u_[s], 0.0, 1.0));
    thermal_.ambient[s] = ss.ambient;
    thermal_.internal[s] = ss.internal;
  }
  update_report();
}

bool Simulator::throttled() const { return scale_ != kNoThrottle; }

void Simulator::step() {
  clamp_warnings_ += advance(thermal_, cfg_.thermal, switch_u_, cfg_.tick_s, cfg_.thermal_mode);
  ++tick_;
  t_ = static_cast<double>(tick_) * cfg_.tick_s;
  const double eps = 1e-9 * cfg_.tick_s;
  while (!pending_.empty() && pending_.front().t_effective <= t_ + eps) {
    auto e = std::move(pending_.front());
    pending_.pop_front();
    apply(e);
  }
  const bool on = flash_.active(t_);
  if (on != flash_on_) {
    flash_on_ = on;
    dirty_ = true;
  }
  if (dirty_) refresh();
  update_report();
}

void Simulator::refresh() {
  const auto& flows = roster_.flows;
  offered_ = generate_offered_load(flows, flash_, t_, scale_);
  tm_ = compute_traffic_matrix(*g_, routing_, offered_, roster_.monitored);
  if (throttled()) {
    // Lift the throttle once the unthrottled load would no longer violate.
    const auto full = generate_offered_load(flows, flash_, t_, kNoThrottle);
    auto cf = compute_traffic_matrix(*g_, routing_, full, roster_.monitored);
    if (!violates(cf)) {
      scale_ = kNoThrottle;
      offered_ = full;
      tm_ = std::move(cf);
    }
  }
  demand_bps_ = 0.0;
  for (const auto& f : flows) demand_bps_ += f.nominal_rate_bps * (flash_on_ && f.flash_group ? flash_.multiplier() : 1.0);

  flow_links_.resize(flows.size());
  for (std::size_t f = 0; f < flows.size(); ++f) flow_links_[f] = g_->path_links(routing_.flow_paths[f]);
  pair_links_.resize(roster_.monitored.size());
  for (std::size_t p = 0; p < roster_.monitored.size(); ++p) pair_links_[p] = flow_links_[roster_.monitored[p].flow];

  const auto fractions = congestion_loss_fractions(*g_, flows, routing_, offered_);
  congestion_survival_.assign(flows.size(), 1.0);
  for (std::size_t f = 0; f < flows.size(); ++f) {
    const auto& path = routing_.flow_paths[f];
    const auto cls = static_cast<std::size_t>(flows[f].service_class);
    double s = 1.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const auto link = flow_links_[f][i];
      s *= 1.0 - fractions[2 * link + static_cast<std::size_t>(g_->direction(link, path[i]))][cls];
    }
    congestion_survival_[f] = s;
  }
  update_switch_utilization();
  dirty_ = false;
}

void Simulator::update_switch_utilization() {
  switch_u_.assign(g_->switch_count(), 0.0);
  for (std::size_t s = 0; s < g_->switch_count(); ++s) {
    const auto adj = g_->neighbors(static_cast<SwitchId>(s));
    if (adj.empty()) continue;
    double sum = 0.0;
    for (const auto& a : adj) sum += tm_.link_utilization[a.link];
    switch_u_[s] = sum / static_cast<double>(adj.size());
  }
}

bool Simulator::violates(const TrafficMatrix& tm) const {
  for (double u : tm.link_utilization)
    if (u > cfg_.intents.u_thr) return true;
  for (double l : tm.path_latency)
    if (l > cfg_.intents.l_thr_s) return true;
  return false;
}

void Simulator::update_report() {
  report_ = check_violations(observe(), cfg_.intents, pair_links_);

  bool any_excess = false;
  for (std::size_t s = 0; s < g_->switch_count(); ++s) {
    excess_[s] = std::max(0.0, thermal_.internal[s] - cfg_.intents.temp_max_c);
    any_excess = any_excess || excess_[s] > 0.0;
  }
  thermal_loss_ = any_excess;

  const auto& flows = roster_.flows;
  double offered = 0.0, delivered = 0.0;
  for (std::size_t f = 0; f < flows.size(); ++f) {
    double s = congestion_survival_[f];
    if (any_excess)
      for (auto sw : routing_.flow_paths[f])
        if (excess_[sw] > 0.0) s *= 1.0 - std::min(1.0, cfg_.loss_per_degree * excess_[sw]);
    offered += offered_[f];
    delivered += offered_[f] * s;
  }
  sample_.t = t_;
  sample_.offered_bps = offered;
  sample_.demand_bps = demand_bps_;
  sample_.delivered_bps = delivered;
  double sum = 0.0, mx = 0.0;
  for (double l : tm_.path_latency) {
    sum += l;
    mx = std::max(mx, l);
  }
  sample_.mean_latency_s = tm_.path_latency.empty() ? 0.0 : sum / static_cast<double>(tm_.path_latency.size());
  sample_.max_latency_s = mx;
  sample_.max_utilization = tm_.link_utilization.empty()
                                ? 0.0
                                : *std::max_element(tm_.link_utilization.begin(), tm_.link_utilization.end());
  sample_.violated = report_.trigger;
  sample_.throttled = throttled();
}

NetworkState Simulator::observe() const { return autoheal::observe(tm_, thermal_.internal, t_); }

std::vector<double> Simulator::normalized_observation() const { return normalize_state(observe(), cfg_.bounds); }

std::pair<double, double> Simulator::reward_terms() const {
  double lat = 0.0;
  for (double l : tm_.path_latency) lat += std::min(1.0, l / cfg_.bounds.latency_max_s);
  if (!tm_.path_latency.empty()) lat /= static_cast<double>(tm_.path_latency.size());
  std::vector<char> seen(g_->link_count(), 0);
  double util = 0.0;
  std::size_t n = 0;
  for (const auto& links : pair_links_)
    for (auto l : links) {
      if (seen[l]) continue;
      seen[l] = 1;
      util += std::min(1.0, tm_.link_utilization[l] / cfg_.bounds.utilization_max);
      ++n;
    }
  return {lat, n ? util / static_cast<double>(n) : 0.0};
}

std::pair<SwitchId, SwitchId> Simulator::pair_leaves(std::size_t pair) const {
  const auto& m = roster_.monitored.at(pair);
  return {g_->hosts()[m.src].leaf, g_->hosts()[m.dst].leaf};
}

void Simulator::reroute_pair(std::size_t pair, const Path& path) {
  const auto [src, dst] = pair_leaves(pair);
  if (path.empty() || path.front() != src || path.back() != dst)
    throw std::invalid_argument("path does not join the pair's leaves");
  g_->path_links(path);  // rejects non-adjacent hops
  const auto& hosts = g_->hosts();
  for (const auto& f : roster_.flows)
    if (hosts[f.src].leaf == src && hosts[f.dst].leaf == dst) routing_.flow_paths[f.id] = path;
  dirty_ = true;
}

void Simulator::set_routing(Routing routing) {
  if (routing.flow_paths.size() != roster_.flows.size()) throw MissingRoute("routing does not cover every flow");
  routing_ = std::move(routing);
  dirty_ = true;
}

void Simulator::throttle(ServiceClass c) {
  if (c == ServiceClass::TimeSensitive) throw std::invalid_argument("time-sensitive traffic is never throttled");
  scale_[static_cast<std::size_t>(c)] = cfg_.throttle_factor;
  dirty_ = true;
}

void Simulator::set_environment(double env_c, double c_hvac) {
  if (c_hvac < 0.0 || c_hvac > 1.0) throw std::invalid_argument("cooling level outside [0,1]");
  thermal_.env = env_c;
  std::fill(thermal_.c_hvac.begin(), thermal_.c_hvac.end(), c_hvac);
}

void Simulator::enqueue(ActuationEvent e) {
  auto it = std::upper_bound(pending_.begin(), pending_.end(), e.t_effective,
                             [](double t, const ActuationEvent& x) { return t < x.t_effective; });
  pending_.insert(it, std::move(e));
}

void Simulator::apply(ActuationEvent& e) {
  using dqn::ActionKind;
  e.t_applied = t_;
  switch (e.action.kind) {
    case ActionKind::Path: {
      const auto& vp = report_.violated_pairs;
      e.stale = !e.pair || std::find(vp.begin(), vp.end(), *e.pair) == vp.end();
      if (e.pair) reroute_pair(*e.pair, e.path);
      break;
    }
    case ActionKind::ThrottleBestEffort:
      e.stale = !report_.trigger;
      throttle(ServiceClass::BestEffort);
      break;
    case ActionKind::ThrottleDelayTolerant:
      e.stale = !report_.trigger;
      throttle(ServiceClass::DelayTolerant);
      break;
    case ActionKind::Cooling:
      e.stale = report_.hot.empty();
      apply_cooling(thermal_, report_.hot, 1.0);
      break;
    case ActionKind::NoOp:
      break;
  }
  applied_.push_back(e);
  if (hook_) hook_(e);
}

}  // namespace autoheal
