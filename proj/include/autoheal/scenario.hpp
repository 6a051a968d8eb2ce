#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "autoheal/thermal.hpp"
#include "autoheal/traffic.hpp"

namespace autoheal {

enum class EnvRegime { InBand, Cold, Hot };  // [18,27], <<18, >>27
std::string_view to_string(EnvRegime r);
EnvRegime env_regime_from_string(std::string_view s);

struct ScenarioConfig {
  std::string id;
  ThermalParams thermal;
  double internal_band_lo_c = 20.0;
  double internal_band_hi_c = 40.0;
  EnvRegime env_regime = EnvRegime::InBand;
  std::string utilization_regime;  // as labelled in the scenario matrix
  std::string latency_regime;
  /// Peak max-link utilization the flash multiplier was calibrated to under
  /// the default roster and ECMP routing on the wpp fabric.
  double target_peak_utilization = 0.5;
  FlashEventConfig flash;
  double nominal_env_c = 22.0;
  /// External temperature after the thermal regime onset.
  double onset_env_c = 22.0;
  double onset_c_hvac = 1.0;
  double p_rack = 0.5;
  double duration_s = 600.0;
  double train_duration_s = 30.0;
  double disruption_fraction = 0.2;
  std::vector<std::uint64_t> seeds{23, 37, 49, 71, 42};

  double disruption_time(double duration) const { return disruption_fraction * duration; }
  bool operator==(const ScenarioConfig&) const = default;
};

class UnknownScenario : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// TC1..TC9.
ScenarioConfig load_scenario(std::string_view id);
std::vector<std::string> scenario_ids();
/// "TC5..TC9", "TC1,TC3" or a single id.
std::vector<std::string> parse_scenario_list(std::string_view spec);

std::string serialize_scenario(const ScenarioConfig& s);
ScenarioConfig parse_scenario(std::string_view json_text);

/// Flash multiplier at which the busiest link direction reaches `target`.
double calibrate_burst_multiplier(const NetworkGraph& g, const FlowRoster& roster, const Routing& routing,
                                  double target);

/// Peak max-link utilization with every flash flow at `multiplier`.
double peak_utilization(const NetworkGraph& g, const FlowRoster& roster, const Routing& routing, double multiplier);

}  // namespace autoheal
