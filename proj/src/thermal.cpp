#include "autoheal/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace autoheal {

void ThermalParams::validate() const {
  if (!(lambda_ambient_s > 0.0) || !(lambda_sw_s > 0.0)) throw std::invalid_argument("thermal time constants must be > 0");
  if (psi_idle < 0.0 || phi_sw < 0.0) throw std::invalid_argument("idle and load rises must be >= 0");
  if (!(gain_scale > 0.0)) throw std::invalid_argument("gain_scale must be > 0");
}

bool ThermalState::finite() const {
  auto ok = [](double v) { return std::isfinite(v); };
  return std::all_of(ambient.begin(), ambient.end(), ok) && std::all_of(internal.begin(), internal.end(), ok);
}

ThermalState make_thermal_state(std::size_t switches, const ThermalParams& params, double env, double p_rack,
                                double c_hvac, double u) {
  const auto eq = steady_state(params, env, p_rack, c_hvac, u);
  ThermalState s;
  s.ambient.assign(switches, eq.ambient);
  s.internal.assign(switches, eq.internal);
  s.env = env;
  s.p_rack.assign(switches, p_rack);
  s.c_hvac.assign(switches, c_hvac);
  return s;
}

double ambient_derivative(const ThermalParams& p, double env, double ambient, double p_rack, double c_hvac) {
  return (env - ambient) / p.lambda_ambient_s + p.gain_scale * (p.kappa_rack * p_rack - p.kappa_cool * c_hvac);
}

double internal_derivative(const ThermalParams& p, double ambient, double internal, double u, InternalModel mode) {
  if (mode == InternalModel::PaperLiteral) return (ambient + p.psi_idle - u) / p.lambda_sw_s + p.phi_sw * u;
  return (ambient + p.psi_idle + p.phi_sw * u - internal) / p.lambda_sw_s;
}

namespace {

void check_dt(double dt, double lambda, const char* which) {
  if (!(dt > 0.0) || dt > lambda / 10.0)
    throw StepSizeError(std::string("dt must lie in (0, ") + which + "/10], got " + std::to_string(dt));
}

}  // namespace

std::vector<double> step_ambient(const ThermalState& state, const ThermalParams& params, double dt) {
  check_dt(dt, params.lambda_ambient_s, "lambda_ambient");
  std::vector<double> out(state.size());
  for (std::size_t k = 0; k < state.size(); ++k)
    out[k] = state.ambient[k] +
             dt * ambient_derivative(params, state.env, state.ambient[k], state.p_rack[k], state.c_hvac[k]);
  return out;
}

InternalStep step_internal(const ThermalState& state, const ThermalParams& params, std::span<const double> utilization,
                           double dt, InternalModel mode) {
  check_dt(dt, params.lambda_sw_s, "lambda_sw");
  InternalStep step;
  step.internal.resize(state.size());
  for (std::size_t k = 0; k < state.size(); ++k) {
    double u = k < utilization.size() ? utilization[k] : 0.0;
    if (u < 0.0 || u > 1.0) {
      u = std::clamp(u, 0.0, 1.0);
      ++step.clamped;
    }
    step.internal[k] = state.internal[k] + dt * internal_derivative(params, state.ambient[k], state.internal[k], u, mode);
  }
  return step;
}

std::size_t advance(ThermalState& state, const ThermalParams& params, std::span<const double> utilization, double dt,
                    InternalModel mode) {
  check_dt(dt, params.lambda_ambient_s, "lambda_ambient");
  check_dt(dt, params.lambda_sw_s, "lambda_sw");
  std::size_t clamped = 0;
  for (std::size_t k = 0; k < state.size(); ++k) {
    double u = k < utilization.size() ? utilization[k] : 0.0;
    if (u < 0.0 || u > 1.0) {
      u = std::clamp(u, 0.0, 1.0);
      ++clamped;
    }
    const double amb = state.ambient[k];
    const double d_amb = ambient_derivative(params, state.env, amb, state.p_rack[k], state.c_hvac[k]);
    const double d_int = internal_derivative(params, amb, state.internal[k], u, mode);
    state.ambient[k] = amb + dt * d_amb;
    state.internal[k] += dt * d_int;
  }
  return clamped;
}

SteadyState steady_state(const ThermalParams& params, double env, double p_rack, double c_hvac, double u) {
  const double ambient =
      env + params.lambda_ambient_s * params.gain_scale * (params.kappa_rack * p_rack - params.kappa_cool * c_hvac);
  return {ambient, ambient + params.psi_idle + params.phi_sw * u};
}

void apply_cooling(ThermalState& state, std::span<const SwitchId> switches, double level) {
  if (!(level >= 0.0 && level <= 1.0)) throw std::invalid_argument("cooling level must lie in [0,1]");
  for (auto s : switches) {
    if (s >= state.c_hvac.size()) throw std::out_of_range("unknown switch " + std::to_string(s));
  }
  for (auto s : switches) state.c_hvac[s] = level;
}

}  // namespace autoheal
