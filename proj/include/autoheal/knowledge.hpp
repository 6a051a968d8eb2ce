#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "autoheal/topology.hpp"
#include "autoheal/traffic.hpp"

namespace autoheal {

/// Agent observation: link utilizations, monitored-pair latencies and switch
/// internal temperatures, flattened in exactly that order.
struct NetworkState {
  std::vector<double> link_utilization;  // n
  std::vector<double> path_latency;      // k, seconds
  std::vector<double> temperature;       // m, degC
  double t = 0.0;

  std::size_t dimension() const { return link_utilization.size() + path_latency.size() + temperature.size(); }
  std::vector<double> flatten() const;
};

NetworkState observe(const TrafficMatrix& tm, std::span<const double> internal_temperature, double t);

struct QoSIntents {
  double u_thr = 0.8;
  double l_thr_s = 3e-3;
  double temp_min_c = 18.0;
  double temp_max_c = 55.0;

  void validate() const;
};

/// Intents document: {u_thr, l_thr_ms, temp_min_c, temp_max_c}.
QoSIntents parse_intents(std::string_view json_text);
std::string serialize_intents(const QoSIntents& intents);

struct ViolationReport {
  std::vector<LinkId> violated_links;
  /// Indices into the monitored-pair list.
  std::vector<std::size_t> violated_pairs;
  /// Relative threshold excess of each violated pair, aligned with violated_pairs.
  std::vector<double> pair_excess;
  std::vector<SwitchId> hot;
  std::vector<SwitchId> cold;
  bool trigger = false;

  bool thermal_alarm() const { return !hot.empty() || !cold.empty(); }
  /// Largest relative excess, lowest pair index on ties.
  std::optional<std::size_t> worst_pair() const;
};

/// `pair_links`, when given, lists the links on each monitored pair's current
/// path; a pair then also counts as violated when any of those links is.
ViolationReport check_violations(const NetworkState& state, const QoSIntents& intents,
                                 std::span<const std::vector<LinkId>> pair_links = {});

struct NormalizationBounds {
  double utilization_max = 1.5;
  double latency_max_s = 10e-3;
  double temp_min_c = 0.0;
  double temp_max_c = 80.0;
};

std::vector<double> normalize_state(const NetworkState& state, const NormalizationBounds& bounds = {});

class OutOfOrderRecord : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bounded, time-ordered store of observed states; evicts oldest first.
class KnowledgeBase {
 public:
  explicit KnowledgeBase(std::size_t capacity = 100000);

  void record(NetworkState state);
  const NetworkState* latest() const { return records_.empty() ? nullptr : &records_.back(); }
  std::vector<NetworkState> window(double t0, double t1) const;
  std::size_t size() const { return records_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<NetworkState>& records() const { return records_; }

 private:
  std::size_t capacity_;
  std::deque<NetworkState> records_;
};

}  // namespace autoheal
