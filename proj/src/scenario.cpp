#include "autoheal/scenario.hpp"

#include <algorithm>
#include <charconv>

#include "json.hpp"

namespace autoheal {

std::string_view to_string(EnvRegime r) {
  switch (r) {
    case EnvRegime::InBand: return "[18,27]";
    case EnvRegime::Cold: return "<<18";
    case EnvRegime::Hot: return ">>27";
  }
  return "?";
}

EnvRegime env_regime_from_string(std::string_view s) {
  if (s == "[18,27]") return EnvRegime::InBand;
  if (s == "<<18") return EnvRegime::Cold;
  if (s == ">>27") return EnvRegime::Hot;
  throw std::invalid_argument("unknown environment regime: " + std::string(s));
}

namespace {

struct Row {
  const char* id;
  double la, lsw, kr, kc, psi, phi;
  double band_lo, band_hi;
  EnvRegime env;
  const char* u_regime;
  const char* l_regime;
  double target_u;
  double multiplier;  // frozen output of calibrate_burst_multiplier for target_u
  double arrival_rate;
  double onset_hvac;
};

// Thermal columns are the scenario matrix verbatim.
constexpr Row kRows[] = {
    {"TC1", 300, 200, 0.80, 1.20, 5.0, 12.0, 20, 40, EnvRegime::InBand, "<<80%", "<<3 ms", 0.50, 4.712829, 0.0, 1.0},
    {"TC2", 310, 210, 0.82, 1.15, 5.1, 12.5, 20, 45, EnvRegime::InBand, "~80%", "~3 ms", 0.85, 8.212829, 0.0, 1.0},
    {"TC3", 330, 230, 0.80, 1.10, 5.3, 12.0, 25, 35, EnvRegime::Cold, "<<80%", "<<3 ms", 0.50, 4.712829, 0.0, 1.0},
    {"TC4", 340, 240, 0.85, 1.05, 5.4, 12.5, 20, 50, EnvRegime::Hot, "<<80%", "<<3 ms", 0.50, 4.712829, 0.0, 0.8},
    {"TC5", 360, 260, 0.90, 0.95, 5.8, 13.0, 25, 40, EnvRegime::Cold, ">=80%", "~3 ms", 1.05, 10.212829, 0.0, 0.8},
    {"TC6", 380, 280, 0.95, 0.90, 6.0, 13.5, 30, 55, EnvRegime::Hot, ">=80%", "~3 ms", 1.05, 10.212829, 0.0, 0.6},
    {"TC7", 420, 300, 1.00, 0.80, 6.5, 14.0, 20, 45, EnvRegime::InBand, ">>80%", ">=3 ms", 1.20, 11.712829, 1.0 / 300, 0.7},
    {"TC8", 450, 330, 1.10, 0.70, 7.0, 14.5, 30, 55, EnvRegime::Cold, ">>80%", ">>3 ms", 1.20, 11.712829, 1.0 / 300, 0.6},
    {"TC9", 500, 380, 1.20, 0.60, 8.0, 15.0, 30, 55, EnvRegime::Hot, ">>90%", ">>5 ms", 1.40, 13.712829, 1.0 / 300, 0.5},
};

double regime_temperature(EnvRegime r) {
  switch (r) {
    case EnvRegime::InBand: return 22.0;
    case EnvRegime::Cold: return 10.0;
    case EnvRegime::Hot: return 35.0;
  }
  return 22.0;
}

ScenarioConfig from_row(const Row& r) {
  ScenarioConfig s;
  s.id = r.id;
  s.thermal.lambda_ambient_s = r.la;
  s.thermal.lambda_sw_s = r.lsw;
  s.thermal.kappa_rack = r.kr;
  s.thermal.kappa_cool = r.kc;
  s.thermal.psi_idle = r.psi;
  s.thermal.phi_sw = r.phi;
  s.internal_band_lo_c = r.band_lo;
  s.internal_band_hi_c = r.band_hi;
  s.env_regime = r.env;
  s.utilization_regime = r.u_regime;
  s.latency_regime = r.l_regime;
  s.target_peak_utilization = r.target_u;
  s.flash = {r.arrival_rate, r.multiplier, 20.0};
  s.onset_env_c = regime_temperature(r.env);
  s.onset_c_hvac = r.onset_hvac;
  return s;
}

}  // namespace

ScenarioConfig load_scenario(std::string_view id) {
  for (const auto& r : kRows)
    if (id == r.id) return from_row(r);
  throw UnknownScenario("unknown scenario id: " + std::string(id));
}

std::vector<std::string> scenario_ids() {
  std::vector<std::string> ids;
  for (const auto& r : kRows) ids.emplace_back(r.id);
  return ids;
}

std::vector<std::string> parse_scenario_list(std::string_view spec) {
  auto index_of = [](std::string_view id) -> int {
    if (id.size() < 3 || id.substr(0, 2) != "TC") throw UnknownScenario("unknown scenario id: " + std::string(id));
    int n = 0;
    auto [p, ec] = std::from_chars(id.data() + 2, id.data() + id.size(), n);
    if (ec != std::errc{} || p != id.data() + id.size()) throw UnknownScenario("unknown scenario id: " + std::string(id));
    load_scenario(id);
    return n;
  };
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    auto comma = spec.find(',', pos);
    if (comma == std::string_view::npos) comma = spec.size();
    const auto item = spec.substr(pos, comma - pos);
    pos = comma + 1;
    if (item.empty()) continue;
    if (auto dots = item.find(".."); dots != std::string_view::npos) {
      const int a = index_of(item.substr(0, dots)), b = index_of(item.substr(dots + 2));
      if (a > b) throw std::invalid_argument("descending scenario range");
      for (int i = a; i <= b; ++i) out.push_back("TC" + std::to_string(i));
    } else {
      index_of(item);
      out.emplace_back(item);
    }
  }
  if (out.empty()) throw std::invalid_argument("empty scenario list");
  return out;
}

std::string serialize_scenario(const ScenarioConfig& s) {
  nlohmann::json j{
      {"id", s.id},
      {"thermal",
       {{"lambda_ambient_s", s.thermal.lambda_ambient_s},
        {"lambda_sw_s", s.thermal.lambda_sw_s},
        {"kappa_rack", s.thermal.kappa_rack},
        {"kappa_cool", s.thermal.kappa_cool},
        {"psi_idle", s.thermal.psi_idle},
        {"phi_sw", s.thermal.phi_sw},
        {"gain_scale", s.thermal.gain_scale}}},
      {"internal_band_c", {s.internal_band_lo_c, s.internal_band_hi_c}},
      {"env_regime", to_string(s.env_regime)},
      {"utilization_regime", s.utilization_regime},
      {"latency_regime", s.latency_regime},
      {"target_peak_utilization", s.target_peak_utilization},
      {"flash",
       {{"arrival_rate", s.flash.arrival_rate},
        {"burst_multiplier", s.flash.burst_multiplier},
        {"duration_s", s.flash.duration_s}}},
      {"nominal_env_c", s.nominal_env_c},
      {"onset_env_c", s.onset_env_c},
      {"onset_c_hvac", s.onset_c_hvac},
      {"p_rack", s.p_rack},
      {"duration_s", s.duration_s},
      {"train_duration_s", s.train_duration_s},
      {"disruption_fraction", s.disruption_fraction},
      {"seeds", s.seeds},
  };
  return j.dump(2);
}

ScenarioConfig parse_scenario(std::string_view json_text) {
  const auto j = nlohmann::json::parse(json_text);
  ScenarioConfig s;
  s.id = j.at("id").get<std::string>();
  const auto& t = j.at("thermal");
  s.thermal.lambda_ambient_s = t.at("lambda_ambient_s");
  s.thermal.lambda_sw_s = t.at("lambda_sw_s");
  s.thermal.kappa_rack = t.at("kappa_rack");
  s.thermal.kappa_cool = t.at("kappa_cool");
  s.thermal.psi_idle = t.at("psi_idle");
  s.thermal.phi_sw = t.at("phi_sw");
  s.thermal.gain_scale = t.at("gain_scale");
  s.internal_band_lo_c = j.at("internal_band_c").at(0);
  s.internal_band_hi_c = j.at("internal_band_c").at(1);
  s.env_regime = env_regime_from_string(j.at("env_regime").get<std::string>());
  s.utilization_regime = j.at("utilization_regime").get<std::string>();
  s.latency_regime = j.at("latency_regime").get<std::string>();
  s.target_peak_utilization = j.at("target_peak_utilization");
  const auto& f = j.at("flash");
  s.flash = {f.at("arrival_rate"), f.at("burst_multiplier"), f.at("duration_s")};
  s.nominal_env_c = j.at("nominal_env_c");
  s.onset_env_c = j.at("onset_env_c");
  s.onset_c_hvac = j.at("onset_c_hvac");
  s.p_rack = j.at("p_rack");
  s.duration_s = j.at("duration_s");
  s.train_duration_s = j.at("train_duration_s");
  s.disruption_fraction = j.at("disruption_fraction");
  s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  s.thermal.validate();
  s.flash.validate();
  return s;
}

double peak_utilization(const NetworkGraph& g, const FlowRoster& roster, const Routing& routing, double multiplier) {
  std::vector<double> offered(roster.flows.size());
  for (std::size_t i = 0; i < offered.size(); ++i)
    offered[i] = roster.flows[i].nominal_rate_bps * (roster.flows[i].flash_group ? multiplier : 1.0);
  const auto load = directed_utilization(g, routing, offered);
  return load.empty() ? 0.0 : *std::max_element(load.begin(), load.end());
}

double calibrate_burst_multiplier(const NetworkGraph& g, const FlowRoster& roster, const Routing& routing,
                                  double target) {
  if (peak_utilization(g, roster, routing, 1.0) >= target) return 1.0;
  double lo = 1.0, hi = 2.0;
  while (peak_utilization(g, roster, routing, hi) < target) {
    hi *= 2.0;
    if (hi > 1e6) throw std::invalid_argument("target utilization unreachable by flash flows");
  }
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (peak_utilization(g, roster, routing, mid) < target ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace autoheal
