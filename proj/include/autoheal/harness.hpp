#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "autoheal/agent.hpp"
#include "autoheal/dqn.hpp"
#include "autoheal/scenario.hpp"
#include "autoheal/simulator.hpp"

namespace autoheal {

/// Run-wide settings; every field can be overridden from a JSON document.
struct AppConfig {
  std::string topology = "wpp";
  SimConfig sim;
  double gain_scale = 0.01;
  TrafficProfile traffic;
  dqn::DQNConfig dqn;
  std::size_t k_paths = 4;
  double detection_delay_s = 2.0;
  /// Exploration rate of a frozen policy during evaluation.
  double eval_epsilon = 0.0;
  /// When positive, replaces the scenario's evaluation duration.
  double duration_s = 0.0;
  /// When positive, replaces the scenario's training-episode duration.
  double train_duration_s = 0.0;
  std::size_t trace_stride = 10;
  std::size_t kb_stride = 100;
  std::vector<std::string> train_mix = scenario_ids();
};

std::string serialize_config(const AppConfig& cfg);
/// Keys absent from the document keep their defaults.
AppConfig parse_config(std::string_view json_text);
/// Defaults overridden by the file named in AUTOHEAL_CONFIG, if set.
AppConfig load_config();
std::uint64_t config_hash(const AppConfig& cfg);

/// Graph, roster and default ECMP routing shared read-only by every run.
struct World {
  NetworkGraph graph;
  FlowRoster roster;
  Routing ecmp;
};
World make_world(const AppConfig& cfg);

enum class Policy { Baseline, Agent, Untrained };
std::string_view to_string(Policy p);
Policy policy_from_string(std::string_view s);

struct TracePoint {
  double t = 0.0;
  double y = 1.0;  // delivered / demanded
  double latency_s = 0.0;
  double max_latency_s = 0.0;
  double max_utilization = 0.0;
  double delivered_bps = 0.0;
  double offered_bps = 0.0;
  bool violated = false;
  bool throttled = false;
};

enum class RecoveryClass { Full, Partial, None };
std::string_view to_string(RecoveryClass c);

struct Resilience {
  double y_pre = 1.0;   // mean y before the disruption
  double y_min = 1.0;   // min y between disruption and recovery
  double dy = 0.0;
  double t_recovery = 0.0;
  double dt = 0.0;
  RecoveryClass cls = RecoveryClass::Full;
};

class EmptyTrace : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Recovery is the first tick at or after `t_disruption` that starts
/// `clean_ticks` consecutive violation-free ticks.
Resilience resilience_metrics(std::span<const TracePoint> trace, double t_disruption, std::size_t clean_ticks = 10);

struct MetricsRecord {
  double latency_ms_mean = 0.0;
  double loss_pct = 0.0;
  double throughput_mbps = 0.0;
  double reaction_s = 0.0;  // mean over reactions; 0 when none
  double recovery_s = 0.0;
  double dy = 0.0;
  RecoveryClass recovery = RecoveryClass::Full;
  /// Share of post-recovery ticks whose worst monitored latency meets l_thr.
  double post_recovery_latency_ok = 1.0;
  std::size_t violation_ticks = 0;

  bool operator==(const MetricsRecord&) const = default;
};

class SimulationDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  double duration_s = 0.0;  // 0 means the scenario's evaluation duration
  bool keep_trace = true;
  /// Training mode: end once recovered after the disruption or at the cap.
  bool stop_on_recovery = false;
  std::size_t max_decisions = 0;  // 0 = unlimited
  double epsilon = 0.0;
  Learner* learner = nullptr;
  /// Called after every tick, once the controller has acted.
  std::function<void(const Simulator&)> observer;
};

struct RunResult {
  MetricsRecord metrics;
  double t_disruption = 0.0;
  std::vector<TracePoint> trace;
  std::vector<ActuationEvent> actuation;
  std::vector<double> reactions;
  std::size_t decisions = 0;
  std::size_t transitions = 0;
  std::size_t kb_records = 0;
  std::size_t clamp_warnings = 0;
  double reward_sum = 0.0;
  double loss_sum = 0.0;
  std::size_t loss_count = 0;
  bool recovered = false;
};

/// Simulates one scenario under one policy. `net` is required for the agent
/// policies and ignored by the baseline.
RunResult run_episode(const World& world, const AppConfig& cfg, const ScenarioConfig& scenario, Policy policy,
                      dqn::QNetwork* net, std::uint64_t seed, const RunOptions& opts = {});

MetricsRecord compute_metrics(std::span<const TracePoint> trace, double t_disruption, std::span<const double> reactions,
                              const QoSIntents& intents, std::size_t clean_ticks = 10);

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

dqn::QNetwork make_network(const World& world, const AppConfig& cfg, std::uint64_t seed);

struct EpisodeStats {
  std::size_t episode = 0;
  std::string scenario;
  double reward = 0.0;
  double epsilon = 0.0;
  double mean_loss = 0.0;
  std::size_t decisions = 0;
  bool recovered = false;
};

struct TrainResult {
  dqn::QNetwork net;
  std::vector<EpisodeStats> curves;
  std::uint64_t grad_steps = 0;
};

TrainResult train(const World& world, const AppConfig& cfg, std::span<const std::string> mix, std::size_t episodes,
                  std::uint64_t seed, const std::function<void(const EpisodeStats&)>& progress = {});

void write_curves_csv(std::ostream& out, std::span<const EpisodeStats> curves);

struct RunSummary {
  Policy policy;
  std::string scenario;
  std::uint64_t seed;
  MetricsRecord metrics;
  std::vector<double> reactions;
};

struct AggregateRow {
  Policy policy;
  std::string scenario;
  std::size_t runs = 0;
  double latency_ms_mean = 0.0;
  std::optional<double> latency_ms_ci;  // nullopt with fewer than two seeds
  double loss_pct = 0.0;
  double throughput_mbps = 0.0;
  double reaction_s = 0.0;
  double recovery_s = 0.0;
  double dy = 0.0;
};

struct Evaluation {
  std::vector<RunSummary> runs;
  std::vector<AggregateRow> rows;  // policy-major, scenario order preserved
};

/// Two-sided 95% Student-t critical value.
double t_critical_95(std::size_t dof);
/// Half-width of the 95% interval of the mean; nullopt below two samples.
std::optional<double> ci95(std::span<const double> xs);

class MissingWeights : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// `weights` must hold a trained network when `policies` includes the agent.
Evaluation evaluate(const World& world, const AppConfig& cfg, std::span<const Policy> policies,
                    std::span<const std::string> scenarios, std::span<const std::uint64_t> seeds,
                    const dqn::QNetwork* weights, std::size_t jobs = 1);

void write_results_csv(std::ostream& out, std::span<const AggregateRow> rows);

/// Recovery-time improvement of the agent over the baseline on the listed
/// scenarios, in percent; nullopt without both policies.
std::optional<double> improvement_pct(const Evaluation& ev, std::span<const std::string> scenarios);

void write_summary(std::ostream& out, const Evaluation& ev);

void write_trace_jsonl(std::ostream& out, std::span<const TracePoint> trace, std::size_t stride, double t_disruption);
void write_actuation_jsonl(std::ostream& out, std::span<const ActuationEvent> events);

}  // namespace autoheal
