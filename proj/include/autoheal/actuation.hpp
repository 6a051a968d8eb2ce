#pragma once

#include <optional>
#include <random>
#include <string>

#include "autoheal/dqn.hpp"
#include "autoheal/topology.hpp"

namespace autoheal {

class Simulator;

inline constexpr double kInstallDelayMin = 1.0e-3;
inline constexpr double kInstallDelayMax = 7.8e-3;

/// A decided action waiting for (or done with) flow-rule installation.
struct ActuationEvent {
  double t_decide = 0.0;
  double delay = 0.0;
  double t_effective = 0.0;
  /// Tick time at which the simulator actually applied it.
  double t_applied = -1.0;
  std::size_t action_index = 0;
  dqn::Action action;
  /// Monitored-pair index targeted by a path action.
  std::optional<std::size_t> pair;
  Path path;
  bool stale = false;
  /// Decided on the tick a violation began.
  bool at_onset = false;
};

/// Uniform installation delay in [1.0, 7.8] ms.
double sample_install_delay(std::mt19937_64& rng);

/// Queues `index` from `space` on the simulator with a sampled installation
/// delay. Throws std::invalid_argument for an index the space does not allow.
ActuationEvent apply_action(Simulator& sim, const dqn::ActionSpace& space, std::size_t index, std::mt19937_64& rng,
                            bool at_onset = false);

std::string actuation_log_line(const ActuationEvent& e);

}  // namespace autoheal
