#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "autoheal/knowledge.hpp"
#include "autoheal/topology.hpp"

namespace autoheal::dqn {

struct DQNConfig {
  double gamma = 0.995;
  double learning_rate = 0.001;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double epsilon_start = 1.0;
  double epsilon_floor = 0.01;
  double epsilon_decay = 0.995;
  std::size_t batch_size = 32;
  std::size_t replay_capacity = 2000;
  std::size_t hidden_units = 24;
  std::size_t hidden_layers = 2;
  /// Target sync period in gradient steps.
  std::size_t target_sync_steps = 300;
  /// When nonzero, sync every this many episodes instead.
  std::size_t target_sync_episodes = 0;
  std::size_t episodes = 1500;
  std::size_t max_decisions = 200;
  std::size_t recovery_ticks = 10;
  double alpha = 0.657;
  double beta = 0.345;
  double capacity_term = 1.0;
  std::uint64_t seed = 42;

  void validate() const;
};

/// max(floor, decay^episode) with start 1.0.
double epsilon_at(std::size_t episode, const DQNConfig& cfg = {});

/// Fully connected network eta -> hidden... -> actions, ReLU hidden
/// activations, linear output. Parameters live in one flat buffer laid out
/// layer by layer as [W (out x in, row-major), b (out)].
class QNetwork {
 public:
  QNetwork() = default;
  QNetwork(std::vector<std::size_t> layer_sizes, std::uint64_t seed);

  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t layer_count() const { return sizes_.size() - 1; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::span<double> weights(std::size_t layer);
  std::span<const double> weights(std::size_t layer) const;
  std::span<double> bias(std::size_t layer);
  std::span<const double> bias(std::size_t layer) const;

  /// Throws std::invalid_argument on a dimension mismatch.
  std::vector<double> forward(std::span<const double> x) const;

  /// Pre- and post-activation values for every layer, used by backprop.
  struct Trace {
    std::vector<std::vector<double>> activations;  // activations[0] = input, last = q
    std::vector<std::vector<double>> pre;          // pre[l] = W_l a_l + b_l
  };
  void forward_trace(std::span<const double> x, Trace& trace) const;

  bool operator==(const QNetwork& other) const = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;  // start of each layer's W
  std::vector<double> params_;
};

void sync_target(const QNetwork& net, QNetwork& target);

struct Transition {
  std::vector<double> s;
  std::size_t a = 0;
  double r = 0.0;
  std::vector<double> s_next;
  bool done = false;
};

/// Bounded FIFO of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 2000);

  void push(Transition t);
  /// Uniform sample without replacement; nullopt while fewer than `batch`
  /// transitions are stored.
  std::optional<std::vector<const Transition*>> sample(std::size_t batch, std::mt19937_64& rng) const;
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<Transition>& items() const { return items_; }

 private:
  std::size_t capacity_;
  std::deque<Transition> items_;
};

/// R = C - (alpha * mean normalized latency + beta * mean normalized utilization).
double reward(double mean_norm_latency, double mean_norm_utilization, const DQNConfig& cfg = {});

std::vector<double> td_targets(std::span<const Transition* const> batch, const QNetwork& target, double gamma);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad;  // same layout as QNetwork::params()
};

/// Mean squared TD error over the batch and its gradient; only the chosen
/// action's output contributes.
LossGradient td_loss_gradient(const QNetwork& net, std::span<const Transition* const> batch,
                              std::span<const double> targets);

class Adam {
 public:
  Adam() = default;
  Adam(std::size_t params, const DQNConfig& cfg);
  void apply(std::span<double> params, std::span<const double> grad);
  std::uint64_t steps() const { return steps_; }

 private:
  double lr_ = 0.001, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::uint64_t steps_ = 0;
  std::vector<double> m_, v_;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One TD step: returns the pre-update loss.
double train_step(QNetwork& net, const QNetwork& target, std::span<const Transition* const> batch, Adam& opt,
                  double gamma);

// Action encoding: [0, K) path slots for the worst-violating pair, then
// throttle best-effort, throttle delay-tolerant, cooling, no-op.
enum class ActionKind { Path, ThrottleBestEffort, ThrottleDelayTolerant, Cooling, NoOp };

struct Action {
  ActionKind kind = ActionKind::NoOp;
  std::size_t slot = 0;  // path slot for ActionKind::Path
};

std::size_t action_count(std::size_t k_paths);
Action decode_action(std::size_t index, std::size_t k_paths);
std::size_t encode_action(const Action& action, std::size_t k_paths);
std::string describe(const Action& action);

struct ActionSpace {
  std::size_t k_paths = 4;
  std::vector<char> eligible;        // per action index
  std::optional<std::size_t> target_pair;
  std::vector<Path> slot_paths;      // candidate path per slot; empty when ineligible

  std::size_t size() const { return eligible.size(); }
  std::size_t eligible_count() const;
};

/// `candidates` are the ranked paths of the worst-violating pair. Path slots
/// whose transit switches are hot or cold are dropped when the report carries
/// a thermal alarm.
ActionSpace build_action_space(const ViolationReport& report, std::span<const Path> candidates, std::size_t k_paths);

struct Selection {
  std::size_t index = 0;
  bool explored = false;
  bool fallback = false;  // no eligible action, no-op forced
};

/// Epsilon-greedy over eligible actions; greedy ties go to the lowest index.
Selection select_action(const QNetwork& net, std::span<const double> state, double epsilon,
                        const ActionSpace& space, std::mt19937_64& rng);
/// Greedy choice over eligible entries of `q`.
std::size_t greedy(std::span<const double> q, std::span<const char> eligible);

struct WeightsHeader {
  std::uint32_t version = 1;
  std::vector<std::size_t> layer_sizes;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};

void save_weights(const std::string& path, const QNetwork& net, std::uint64_t seed, std::uint64_t config_hash);
QNetwork load_weights(const std::string& path, WeightsHeader* header = nullptr);

}  // namespace autoheal::dqn
