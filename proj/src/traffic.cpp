#include "autoheal/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace autoheal {

using nlohmann::json;

std::string_view to_string(ServiceClass c) {
  switch (c) {
    case ServiceClass::TimeSensitive: return "critical-time-sensitive";
    case ServiceClass::DelayTolerant: return "critical-delay-tolerant";
    case ServiceClass::BestEffort: return "best-effort";
  }
  return "best-effort";
}

ServiceClass service_class_from_string(std::string_view s) {
  if (s == "critical-time-sensitive") return ServiceClass::TimeSensitive;
  if (s == "critical-delay-tolerant") return ServiceClass::DelayTolerant;
  if (s == "best-effort") return ServiceClass::BestEffort;
  throw InvalidSpec("unknown service class '" + std::string(s) + "'");
}

FlowRoster make_roster(const NetworkGraph& g, const TrafficProfile& profile) {
  std::vector<HostId> ldaq, ecp, mu, vied;
  for (const auto& h : g.hosts()) {
    switch (h.role) {
      case HostRole::Ldaq: ldaq.push_back(h.id); break;
      case HostRole::Ecp: ecp.push_back(h.id); break;
      case HostRole::Mu: mu.push_back(h.id); break;
      case HostRole::Vied: vied.push_back(h.id); break;
    }
  }
  if (ecp.empty() || ldaq.empty()) throw InvalidSpec("roster needs at least one LDAQ and one ECP host");

  FlowRoster roster;
  auto add = [&](HostId src, HostId dst, ServiceClass cls, double rate, std::string label, bool flash = false) {
    const auto id = static_cast<FlowId>(roster.flows.size());
    roster.flows.push_back({id, src, dst, cls, rate, flash, std::move(label)});
    return id;
  };

  const HostId target = ecp.front();
  for (std::size_t i = 0; i < ldaq.size(); ++i) {
    const auto id = add(ldaq[i], target, ServiceClass::TimeSensitive, profile.operational_rate_bps, "operational");
    if (i < profile.monitored_pairs) roster.monitored.push_back({ldaq[i], target, id});
  }
  if (!vied.empty())
    for (std::size_t i = 0; i < mu.size(); ++i)
      add(mu[i], vied[i % vied.size()], ServiceClass::TimeSensitive, profile.sv_rate_bps, "protection-sv");
  if (!mu.empty())
    for (std::size_t i = 0; i < vied.size(); ++i)
      add(vied[i], mu[i % mu.size()], ServiceClass::TimeSensitive, profile.goose_rate_bps, "control-goose");
  for (std::size_t i = 0; i < ldaq.size(); ++i)
    add(ldaq[i], ecp[(i + 1) % ecp.size()], ServiceClass::DelayTolerant, profile.condition_rate_bps,
        "condition-monitoring");
  for (std::size_t i = 0; i < ldaq.size(); ++i)
    add(ldaq[i], ecp[(i + 2) % ecp.size()], ServiceClass::BestEffort, profile.meteo_rate_bps, "meteorological");
  for (std::size_t i = 0; i < ldaq.size(); ++i)
    add(ldaq[i], ecp[(i + 3) % ecp.size()], ServiceClass::BestEffort, profile.maintenance_rate_bps, "maintenance");
  for (std::size_t i = 0; i < std::min(profile.flash_fanin, ldaq.size()); ++i)
    add(ldaq[i], target, ServiceClass::BestEffort, profile.bulk_rate_bps, "bulk", true);
  return roster;
}

std::string serialize_roster(const FlowRoster& roster) {
  json doc;
  doc["flows"] = json::array();
  for (const auto& f : roster.flows)
    doc["flows"].push_back({{"id", f.id},
                            {"src", f.src},
                            {"dst", f.dst},
                            {"class", to_string(f.service_class)},
                            {"priority", priority(f.service_class)},
                            {"rate_bps", f.nominal_rate_bps},
                            {"flash_group", f.flash_group},
                            {"label", f.label}});
  doc["monitored"] = json::array();
  for (const auto& m : roster.monitored) doc["monitored"].push_back({{"src", m.src}, {"dst", m.dst}, {"flow", m.flow}});
  return doc.dump(2);
}

FlowRoster parse_roster(std::string_view json_text) {
  try {
    const auto doc = json::parse(json_text);
    FlowRoster roster;
    for (const auto& f : doc.at("flows")) {
      FlowSpec spec{f.at("id").get<FlowId>(),
                    f.at("src").get<HostId>(),
                    f.at("dst").get<HostId>(),
                    service_class_from_string(f.at("class").get<std::string>()),
                    f.at("rate_bps").get<double>(),
                    f.value("flash_group", false),
                    f.value("label", std::string{})};
      if (!(spec.nominal_rate_bps > 0.0)) throw InvalidSpec("flow rate must be > 0");
      if (spec.id != roster.flows.size()) throw InvalidSpec("flow ids must be dense and ordered");
      roster.flows.push_back(std::move(spec));
    }
    for (const auto& m : doc.value("monitored", json::array()))
      roster.monitored.push_back({m.at("src").get<HostId>(), m.at("dst").get<HostId>(), m.at("flow").get<FlowId>()});
    return roster;
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("roster JSON: ") + e.what());
  }
}

void FlashEventConfig::validate() const {
  if (arrival_rate < 0.0) throw InvalidSpec("flash arrival rate must be >= 0");
  if (burst_multiplier < 1.0) throw InvalidSpec("flash burst multiplier must be >= 1");
  if (!(duration_s > 0.0)) throw InvalidSpec("flash duration must be > 0");
}

FlashProcess::FlashProcess(FlashEventConfig config, std::uint64_t seed) : config_(config), rng_(seed) {
  config_.validate();
  next_arrival_ = std::numeric_limits<double>::infinity();
  if (config_.arrival_rate > 0.0) next_arrival_ = std::exponential_distribution<double>(config_.arrival_rate)(rng_);
}

void FlashProcess::schedule(double start_s, double duration_s) { windows_.push_back({start_s, start_s + duration_s}); }

bool FlashProcess::active(double t) {
  while (next_arrival_ <= t) {
    windows_.push_back({next_arrival_, next_arrival_ + config_.duration_s});
    next_arrival_ += std::exponential_distribution<double>(config_.arrival_rate)(rng_);
  }
  std::erase_if(windows_, [t](const Window& w) { return w.end <= t; });
  return std::any_of(windows_.begin(), windows_.end(), [t](const Window& w) { return w.start <= t; });
}

std::vector<double> generate_offered_load(std::span<const FlowSpec> flows, FlashProcess& flash, double t,
                                          const ClassScale& scale) {
  const bool burst = flash.active(t);
  std::vector<double> out(flows.size());
  for (std::size_t i = 0; i < flows.size(); ++i) {
    double rate = flows[i].nominal_rate_bps;
    if (burst && flows[i].flash_group) rate *= flash.multiplier();
    out[i] = rate * scale[static_cast<std::size_t>(flows[i].service_class)];
  }
  return out;
}

DirectedLoad directed_utilization(const NetworkGraph& g, const Routing& routing, std::span<const double> offered) {
  DirectedLoad load(2 * g.link_count(), 0.0);
  if (routing.flow_paths.size() < offered.size()) throw MissingRoute("routing covers fewer flows than offered");
  for (std::size_t f = 0; f < offered.size(); ++f) {
    const auto& path = routing.flow_paths[f];
    if (path.empty()) throw MissingRoute("flow " + std::to_string(f) + " has no route");
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const auto link = g.link_between(path[i], path[i + 1]);
      if (!link) throw MissingRoute("flow " + std::to_string(f) + " route uses a missing link");
      load[2 * *link + static_cast<std::size_t>(g.direction(*link, path[i]))] += offered[f];
    }
  }
  for (std::size_t l = 0; l < g.link_count(); ++l) {
    load[2 * l] /= g.links()[l].capacity_bps;
    load[2 * l + 1] /= g.links()[l].capacity_bps;
  }
  return load;
}

double path_latency(const NetworkGraph& g, const Path& path, const DirectedLoad& utilization) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto link = g.link_between(path[i], path[i + 1]);
    if (!link) throw MissingRoute("path uses a missing link");
    const auto& l = g.links()[*link];
    const double rho = utilization[2 * *link + static_cast<std::size_t>(g.direction(*link, path[i]))];
    const double service = kMtuBits / l.capacity_bps;
    const double r = std::min(rho, kRhoClamp);
    total += l.delay_s + service * r / (1.0 - r);
  }
  return total;
}

TrafficMatrix compute_traffic_matrix(const NetworkGraph& g, const Routing& routing, std::span<const double> offered,
                                     std::span<const MonitoredPair> monitored) {
  TrafficMatrix tm;
  tm.directed_utilization = directed_utilization(g, routing, offered);
  tm.link_utilization.resize(g.link_count());
  for (std::size_t l = 0; l < g.link_count(); ++l)
    tm.link_utilization[l] = std::max(tm.directed_utilization[2 * l], tm.directed_utilization[2 * l + 1]);
  tm.path_latency.reserve(monitored.size());
  for (const auto& m : monitored) {
    if (m.flow >= routing.flow_paths.size() || routing.flow_paths[m.flow].empty())
      throw MissingRoute("monitored pair has no route");
    tm.path_latency.push_back(path_latency(g, routing.flow_paths[m.flow], tm.directed_utilization));
  }
  return tm;
}

std::vector<ClassScale> congestion_loss_fractions(const NetworkGraph& g, std::span<const FlowSpec> flows,
                                                  const Routing& routing, std::span<const double> offered) {
  const std::size_t dirs = 2 * g.link_count();
  std::vector<ClassScale> per_class(dirs, ClassScale{0.0, 0.0, 0.0});
  for (std::size_t f = 0; f < offered.size(); ++f) {
    const auto& path = routing.flow_paths.at(f);
    if (path.empty()) throw MissingRoute("flow " + std::to_string(f) + " has no route");
    const auto cls = static_cast<std::size_t>(flows[f].service_class);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const auto link = *g.link_between(path[i], path[i + 1]);
      per_class[2 * link + static_cast<std::size_t>(g.direction(link, path[i]))][cls] += offered[f];
    }
  }
  std::vector<ClassScale> fractions(dirs, ClassScale{0.0, 0.0, 0.0});
  for (std::size_t d = 0; d < dirs; ++d) {
    const auto& load = per_class[d];
    const double total = load[0] + load[1] + load[2];
    double excess = total - g.links()[d / 2].capacity_bps;
    if (excess <= 0.0) continue;
    // Drop best-effort first, then delay-tolerant, then time-sensitive.
    for (std::size_t c = kServiceClassCount; c-- > 0 && excess > 0.0;) {
      if (load[c] <= 0.0) continue;
      const double dropped = std::min(excess, load[c]);
      fractions[d][c] = dropped / load[c];
      excess -= dropped;
    }
  }
  return fractions;
}

LossReport packet_loss(const NetworkGraph& g, std::span<const FlowSpec> flows, const Routing& routing,
                       std::span<const double> offered, std::span<const double> thermal_excess,
                       double loss_per_degree) {
  const auto fractions = congestion_loss_fractions(g, flows, routing, offered);
  LossReport report;
  report.flow_loss.resize(offered.size());
  report.delivered_bps.resize(offered.size());
  report.admitted_bps.assign(2 * g.link_count(), 0.0);
  for (std::size_t f = 0; f < offered.size(); ++f) {
    const auto& path = routing.flow_paths[f];
    const auto cls = static_cast<std::size_t>(flows[f].service_class);
    double survive = 1.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const auto link = *g.link_between(path[i], path[i + 1]);
      const auto d = 2 * link + static_cast<std::size_t>(g.direction(link, path[i]));
      survive *= 1.0 - fractions[d][cls];
      report.admitted_bps[d] += offered[f] * (1.0 - fractions[d][cls]);
    }
    for (auto s : path) {
      const double excess = s < thermal_excess.size() ? thermal_excess[s] : 0.0;
      if (excess > 0.0) survive *= 1.0 - std::min(1.0, loss_per_degree * excess);
    }
    report.flow_loss[f] = std::clamp(1.0 - survive, 0.0, 1.0);
    report.delivered_bps[f] = offered[f] * survive;
    report.offered_bps += offered[f];
    report.delivered_total_bps += report.delivered_bps[f];
  }
  report.aggregate_loss =
      report.offered_bps > 0.0 ? std::clamp(1.0 - report.delivered_total_bps / report.offered_bps, 0.0, 1.0) : 0.0;
  return report;
}

}  // namespace autoheal
