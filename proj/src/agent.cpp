#include "autoheal/agent.hpp"

#include <cmath>
#include <set>

namespace autoheal {

Learner::Learner(const dqn::QNetwork& net, const dqn::DQNConfig& c)
    : cfg(c), target(net), replay(c.replay_capacity), opt(net.params().size(), c), rng(c.seed ^ 0x5bd1e995ULL) {}

std::vector<std::size_t> layer_sizes(std::size_t eta, std::size_t actions, const dqn::DQNConfig& cfg) {
  std::vector<std::size_t> sizes{eta};
  for (std::size_t i = 0; i < cfg.hidden_layers; ++i) sizes.push_back(cfg.hidden_units);
  sizes.push_back(actions);
  return sizes;
}

namespace {

PathInventory monitored_inventory(const Simulator& sim, std::size_t k) {
  std::set<PathInventory::Key> keys;
  for (std::size_t p = 0; p < sim.roster().monitored.size(); ++p) {
    const auto leaves = sim.pair_leaves(p);
    if (leaves.first != leaves.second) keys.insert(leaves);
  }
  const std::vector<PathInventory::Key> list(keys.begin(), keys.end());
  return PathInventory(sim.graph(), list, k);
}

}  // namespace

AgentController::AgentController(const Simulator& sim, dqn::QNetwork& net, std::uint64_t seed, std::size_t k_paths)
    : net_(&net), k_(k_paths), rng_(seed), inventory_(monitored_inventory(sim, k_paths)) {
  const auto eta = sim.observe().dimension();
  if (net.input_size() != eta || net.output_size() != dqn::action_count(k_paths))
    throw std::invalid_argument("network shape does not match the simulator (eta " + std::to_string(eta) +
                                ", actions " + std::to_string(dqn::action_count(k_paths)) + ")");
}

void AgentController::store(Simulator& sim) {
  awaiting_ = false;
  if (!learner_) return;
  const auto [lat, util] = sim.reward_terms();
  const double r = dqn::reward(lat, util, learner_->cfg);
  // A violation-free outcome ends the episode. The constant term is left out
  // of the stored reward: with a terminal state, a positive per-step constant
  // would pay the agent for keeping the violation alive.
  const bool healed = !sim.violations().trigger;
  learner_->replay.push({std::move(s_), a_, r - learner_->cfg.capacity_term, sim.normalized_observation(), healed});
  ++transitions_;
  reward_sum_ += r;
  auto batch = learner_->replay.sample(learner_->cfg.batch_size, learner_->rng);
  if (!batch) return;
  const double loss = dqn::train_step(*net_, learner_->target, *batch, learner_->opt, learner_->cfg.gamma);
  loss_sum_ += loss;
  ++loss_count_;
  ++learner_->grad_steps;
  if (learner_->cfg.target_sync_episodes == 0 && learner_->grad_steps % learner_->cfg.target_sync_steps == 0)
    dqn::sync_target(*net_, learner_->target);
}

void AgentController::decide(Simulator& sim, bool onset) {
  const auto& report = sim.violations();
  std::span<const Path> candidates;
  if (auto worst = report.worst_pair()) {
    const auto [src, dst] = sim.pair_leaves(*worst);
    candidates = inventory_.paths(src, dst);
  }
  const auto space = dqn::build_action_space(report, candidates, k_);
  auto s = sim.normalized_observation();
  const auto sel = dqn::select_action(*net_, s, epsilon_, space, rng_);
  const std::size_t outstanding = sim.applied().size() + sim.pending();
  apply_action(sim, space, sel.index, rng_, onset);
  awaiting_ = true;
  awaited_applied_ = outstanding + 1;
  s_ = std::move(s);
  a_ = sel.index;
  ++decisions_;
}

void AgentController::on_tick(Simulator& sim) {
  const bool violated = sim.violations().trigger;
  const bool onset = violated && !prev_violated_;
  prev_violated_ = violated;
  if (awaiting_ && (sim.applied().size() >= awaited_applied_ || onset)) store(sim);
  if (!violated) return;
  if (onset || !awaiting_) decide(sim, onset);
}

void AgentController::flush(Simulator& sim) {
  if (awaiting_) store(sim);
}

}  // namespace autoheal
