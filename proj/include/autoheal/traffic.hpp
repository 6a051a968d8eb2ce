#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "autoheal/topology.hpp"

namespace autoheal {

using FlowId = std::uint32_t;

enum class ServiceClass : std::uint8_t { TimeSensitive = 0, DelayTolerant = 1, BestEffort = 2 };
inline constexpr std::size_t kServiceClassCount = 3;

/// Lower value is higher priority.
constexpr int priority(ServiceClass c) { return static_cast<int>(c); }
std::string_view to_string(ServiceClass c);
ServiceClass service_class_from_string(std::string_view s);

struct FlowSpec {
  FlowId id = 0;
  HostId src = 0;
  HostId dst = 0;
  ServiceClass service_class = ServiceClass::BestEffort;
  double nominal_rate_bps = 0.0;
  /// Bulk transfer that bursts during flash events.
  bool flash_group = false;
  std::string label;
};

/// A source/destination host pair whose end-to-end latency is observed.
/// `flow` names the critical flow whose route defines the measured path.
struct MonitoredPair {
  HostId src = 0;
  HostId dst = 0;
  FlowId flow = 0;
};

/// Message-size and rate defaults for the wind-farm service classes.
struct TrafficProfile {
  double sv_rate_bps = 9600.0 * 126 * 8;        // protection sampled values
  double goose_rate_bps = 4800.0 * 200 * 8;     // control messages
  double operational_rate_bps = 1000.0 * 512 * 8;
  double condition_rate_bps = 1000.0 * 512 * 8;
  double meteo_rate_bps = 1.0 * 512 * 8;
  double maintenance_rate_bps = 10.0 * 512 * 8;
  double bulk_rate_bps = 20e6;                  // background iperf-style transfers
  std::size_t flash_fanin = 8;
  std::size_t monitored_pairs = 6;
};

struct FlowRoster {
  std::vector<FlowSpec> flows;
  std::vector<MonitoredPair> monitored;
};

/// Builds the default roster: every LDAQ streams operational data to one
/// aggregating ECP (the flash target), condition/meteo/maintenance data to
/// rotating ECPs, MU<->vIED exchange sampled values and control messages,
/// and the first `flash_fanin` LDAQs hold a bulk transfer to the target.
FlowRoster make_roster(const NetworkGraph& g, const TrafficProfile& profile = {});

std::string serialize_roster(const FlowRoster& roster);
FlowRoster parse_roster(std::string_view json_text);

struct FlashEventConfig {
  double arrival_rate = 0.0;      // events per second, Poisson
  double burst_multiplier = 1.0;
  double duration_s = 1.0;

  void validate() const;
  bool operator==(const FlashEventConfig&) const = default;
};

/// Flash-event windows over time. Poisson arrivals are drawn lazily from the
/// supplied rng as time advances; explicit windows can be scheduled too.
class FlashProcess {
 public:
  FlashProcess() = default;
  FlashProcess(FlashEventConfig config, std::uint64_t seed);

  void schedule(double start_s, double duration_s);
  /// True if any window covers t. `t` must be nondecreasing across calls.
  bool active(double t);
  double multiplier() const { return config_.burst_multiplier; }
  const FlashEventConfig& config() const { return config_; }

 private:
  struct Window {
    double start;
    double end;
  };
  FlashEventConfig config_{};
  std::mt19937_64 rng_{0};
  double next_arrival_ = 0.0;
  std::vector<Window> windows_;
};

/// Per-class multiplicative scale applied by throttling.
using ClassScale = std::array<double, kServiceClassCount>;
inline constexpr ClassScale kNoThrottle{1.0, 1.0, 1.0};

std::vector<double> generate_offered_load(std::span<const FlowSpec> flows, FlashProcess& flash, double t,
                                          const ClassScale& scale = kNoThrottle);

class MissingRoute : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Switch path per flow (indexed by FlowId), from the source host's leaf to
/// the destination host's leaf. Single-switch paths are legal.
struct Routing {
  std::vector<Path> flow_paths;
};

/// Utilization per link direction, index 2*link + direction.
using DirectedLoad = std::vector<double>;

struct TrafficMatrix {
  /// Per link, max over its two directions.
  std::vector<double> link_utilization;
  /// Per monitored pair, seconds.
  std::vector<double> path_latency;
  DirectedLoad directed_utilization;
};

inline constexpr double kMtuBits = 1500.0 * 8;
inline constexpr double kRhoClamp = 0.95;

/// Directed offered load as a fraction of capacity. Throws MissingRoute for a
/// flow with an empty path.
DirectedLoad directed_utilization(const NetworkGraph& g, const Routing& routing, std::span<const double> offered);

double path_latency(const NetworkGraph& g, const Path& path, const DirectedLoad& utilization);

TrafficMatrix compute_traffic_matrix(const NetworkGraph& g, const Routing& routing, std::span<const double> offered,
                                     std::span<const MonitoredPair> monitored);

struct LossReport {
  std::vector<double> flow_loss;       // fraction in [0,1]
  std::vector<double> delivered_bps;
  double aggregate_loss = 0.0;         // rate-weighted
  double offered_bps = 0.0;
  double delivered_total_bps = 0.0;
  /// Per link direction: admitted rate after that link's own drops.
  std::vector<double> admitted_bps;
};

inline constexpr double kDefaultThermalLossPerDegree = 0.002;

/// Drop fraction per link direction (index 2*link + direction) and class,
/// computed from offered rates.
std::vector<ClassScale> congestion_loss_fractions(const NetworkGraph& g, std::span<const FlowSpec> flows,
                                                  const Routing& routing, std::span<const double> offered);

/// Congestion drops fill best-effort first, then delay-tolerant, then
/// time-sensitive. `thermal_excess` holds max(0, tau_internal - tau_max)
/// per switch.
LossReport packet_loss(const NetworkGraph& g, std::span<const FlowSpec> flows, const Routing& routing,
                       std::span<const double> offered, std::span<const double> thermal_excess,
                       double loss_per_degree = kDefaultThermalLossPerDegree);

}  // namespace autoheal
