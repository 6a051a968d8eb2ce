#include "autoheal/actuation.hpp"

#include <stdexcept>

#include "autoheal/simulator.hpp"
#include "json.hpp"

namespace autoheal {

double sample_install_delay(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(kInstallDelayMin, kInstallDelayMax)(rng);
}

ActuationEvent apply_action(Simulator& sim, const dqn::ActionSpace& space, std::size_t index, std::mt19937_64& rng,
                            bool at_onset) {
  if (index >= space.size() || !space.eligible[index]) throw std::invalid_argument("action not eligible");
  ActuationEvent e;
  e.action_index = index;
  e.action = dqn::decode_action(index, space.k_paths);
  if (e.action.kind == dqn::ActionKind::Path) {
    e.pair = space.target_pair;
    e.path = space.slot_paths.at(e.action.slot);
  }
  e.t_decide = sim.now();
  e.delay = sample_install_delay(rng);
  e.t_effective = e.t_decide + e.delay;
  e.at_onset = at_onset;
  sim.enqueue(e);
  return e;
}

std::string actuation_log_line(const ActuationEvent& e) {
  nlohmann::json j{{"t_decide", e.t_decide},
                   {"t_effective", e.t_effective},
                   {"t_applied", e.t_applied},
                   {"delay_ms", e.delay * 1e3},
                   {"action", e.action_index},
                   {"kind", dqn::describe(e.action)},
                   {"stale", e.stale},
                   {"at_onset", e.at_onset}};
  if (e.pair) j["pair"] = *e.pair;
  if (!e.path.empty()) j["path"] = e.path;
  return j.dump();
}

}  // namespace autoheal
