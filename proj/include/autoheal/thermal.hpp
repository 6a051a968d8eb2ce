#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "autoheal/topology.hpp"

namespace autoheal {

/// Time constants in seconds, gains in degC/s per unit input, rises in degC.
/// `gain_scale` multiplies both rack and cooling gains.
struct ThermalParams {
  double lambda_ambient_s = 300.0;
  double lambda_sw_s = 200.0;
  double kappa_rack = 0.80;
  double kappa_cool = 1.20;
  double psi_idle = 5.0;
  double phi_sw = 12.0;
  double gain_scale = 0.01;

  void validate() const;
  bool operator==(const ThermalParams&) const = default;
};

enum class InternalModel {
  /// Integrates the load term exactly as printed: no relaxation toward the
  /// driven equilibrium, so temperatures drift without bound.
  PaperLiteral,
  /// Standard first-order lumped-capacity form relaxing toward
  /// ambient + idle rise + load rise.
  FirstOrderCorrected,
};

struct ThermalState {
  std::vector<double> ambient;   // per switch, degC
  std::vector<double> internal;  // per switch, degC
  double env = 22.0;             // external environment, degC
  std::vector<double> p_rack;    // per switch, [0,1]
  std::vector<double> c_hvac;    // per switch, [0,1]

  std::size_t size() const { return ambient.size(); }
  bool finite() const;
};

class StepSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform state for `switches` switches sitting at the corrected-mode
/// equilibrium for utilization `u`.
ThermalState make_thermal_state(std::size_t switches, const ThermalParams& params, double env, double p_rack,
                                double c_hvac, double u = 0.0);

double ambient_derivative(const ThermalParams& p, double env, double ambient, double p_rack, double c_hvac);
double internal_derivative(const ThermalParams& p, double ambient, double internal, double u, InternalModel mode);

std::vector<double> step_ambient(const ThermalState& state, const ThermalParams& params, double dt);

struct InternalStep {
  std::vector<double> internal;
  std::size_t clamped = 0;  // utilizations pulled back into [0,1]
};

InternalStep step_internal(const ThermalState& state, const ThermalParams& params, std::span<const double> utilization,
                           double dt, InternalModel mode = InternalModel::FirstOrderCorrected);

/// Explicit-Euler step of both temperatures from the same old state.
/// Returns the number of clamped utilizations.
std::size_t advance(ThermalState& state, const ThermalParams& params, std::span<const double> utilization, double dt,
                    InternalModel mode = InternalModel::FirstOrderCorrected);

struct SteadyState {
  double ambient;
  double internal;
};

/// Corrected-mode equilibrium for constant inputs.
SteadyState steady_state(const ThermalParams& params, double env, double p_rack, double c_hvac, double u);

/// Sets C_hvac for the listed switches; throws std::out_of_range for an
/// unknown switch and std::invalid_argument for a level outside [0,1].
void apply_cooling(ThermalState& state, std::span<const SwitchId> switches, double level);

}  // namespace autoheal
