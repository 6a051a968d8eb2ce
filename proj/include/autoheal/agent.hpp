#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "autoheal/dqn.hpp"
#include "autoheal/simulator.hpp"

namespace autoheal {

/// Replay, target network and optimizer state carried across episodes.
struct Learner {
  explicit Learner(const dqn::QNetwork& net, const dqn::DQNConfig& cfg);

  dqn::DQNConfig cfg;
  dqn::QNetwork target;
  dqn::ReplayBuffer replay;
  dqn::Adam opt;
  std::mt19937_64 rng;
  std::uint64_t grad_steps = 0;
};

/// Threshold-triggered decision loop. Quiet while every intent holds; on a
/// violation it picks an action for the worst pair and waits for it to take
/// effect before deciding again. A new violation onset always gets an
/// immediate decision.
class AgentController {
 public:
  AgentController(const Simulator& sim, dqn::QNetwork& net, std::uint64_t seed, std::size_t k_paths = 4);

  /// Enables transition storage and TD updates.
  void attach(Learner* learner) { learner_ = learner; }
  void set_epsilon(double eps) { epsilon_ = eps; }

  void on_tick(Simulator& sim);
  /// Stores the outstanding transition, if any.
  void flush(Simulator& sim);

  std::size_t decisions() const { return decisions_; }
  std::size_t transitions() const { return transitions_; }
  double reward_sum() const { return reward_sum_; }
  double loss_sum() const { return loss_sum_; }
  std::size_t loss_count() const { return loss_count_; }
  std::size_t k_paths() const { return k_; }

 private:
  void store(Simulator& sim);
  void decide(Simulator& sim, bool onset);

  dqn::QNetwork* net_;
  Learner* learner_ = nullptr;
  std::size_t k_;
  std::mt19937_64 rng_;
  double epsilon_ = 0.0;
  PathInventory inventory_;

  bool prev_violated_ = false;
  bool awaiting_ = false;
  std::size_t awaited_applied_ = 0;  // sim.applied().size() once our action lands
  std::vector<double> s_;
  std::size_t a_ = 0;

  std::size_t decisions_ = 0;
  std::size_t transitions_ = 0;
  double reward_sum_ = 0.0;
  double loss_sum_ = 0.0;
  std::size_t loss_count_ = 0;
};

std::vector<std::size_t> layer_sizes(std::size_t eta, std::size_t actions, const dqn::DQNConfig& cfg);

}  // namespace autoheal
