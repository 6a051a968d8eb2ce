#include "autoheal/knowledge.hpp"

#include <algorithm>

#include "json.hpp"

namespace autoheal {

using nlohmann::json;

std::vector<double> NetworkState::flatten() const {
  std::vector<double> out;
  out.reserve(dimension());
  out.insert(out.end(), link_utilization.begin(), link_utilization.end());
  out.insert(out.end(), path_latency.begin(), path_latency.end());
  out.insert(out.end(), temperature.begin(), temperature.end());
  return out;
}

NetworkState observe(const TrafficMatrix& tm, std::span<const double> internal_temperature, double t) {
  NetworkState s;
  s.link_utilization = tm.link_utilization;
  s.path_latency = tm.path_latency;
  s.temperature.assign(internal_temperature.begin(), internal_temperature.end());
  s.t = t;
  return s;
}

void QoSIntents::validate() const {
  if (!(u_thr > 0.0 && u_thr <= 1.0)) throw std::invalid_argument("u_thr must lie in (0,1]");
  if (!(l_thr_s > 0.0)) throw std::invalid_argument("l_thr must be > 0");
  if (!(temp_min_c < temp_max_c)) throw std::invalid_argument("temp_min must be below temp_max");
}

QoSIntents parse_intents(std::string_view json_text) {
  QoSIntents q;
  try {
    const auto doc = json::parse(json_text);
    q.u_thr = doc.value("u_thr", q.u_thr);
    q.l_thr_s = doc.value("l_thr_ms", q.l_thr_s * 1e3) * 1e-3;
    q.temp_min_c = doc.value("temp_min_c", q.temp_min_c);
    q.temp_max_c = doc.value("temp_max_c", q.temp_max_c);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("intents JSON: ") + e.what());
  }
  q.validate();
  return q;
}

std::string serialize_intents(const QoSIntents& q) {
  return json{{"u_thr", q.u_thr}, {"l_thr_ms", q.l_thr_s * 1e3}, {"temp_min_c", q.temp_min_c},
              {"temp_max_c", q.temp_max_c}}
      .dump();
}

std::optional<std::size_t> ViolationReport::worst_pair() const {
  if (violated_pairs.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < violated_pairs.size(); ++i) {
    if (pair_excess[i] > pair_excess[best]) best = i;
  }
  return violated_pairs[best];
}

ViolationReport check_violations(const NetworkState& state, const QoSIntents& intents,
                                 std::span<const std::vector<LinkId>> pair_links) {
  ViolationReport r;
  for (std::size_t i = 0; i < state.link_utilization.size(); ++i) {
    if (state.link_utilization[i] > intents.u_thr) r.violated_links.push_back(static_cast<LinkId>(i));
  }
  for (std::size_t j = 0; j < state.path_latency.size(); ++j) {
    double excess = state.path_latency[j] / intents.l_thr_s - 1.0;
    bool violated = state.path_latency[j] > intents.l_thr_s;
    if (j < pair_links.size()) {
      for (auto l : pair_links[j]) {
        const double u = state.link_utilization[l];
        if (u > intents.u_thr) violated = true;
        excess = std::max(excess, u / intents.u_thr - 1.0);
      }
    }
    if (violated) {
      r.violated_pairs.push_back(j);
      r.pair_excess.push_back(excess);
    }
  }
  for (std::size_t k = 0; k < state.temperature.size(); ++k) {
    if (state.temperature[k] >= intents.temp_max_c) r.hot.push_back(static_cast<SwitchId>(k));
    if (state.temperature[k] <= intents.temp_min_c) r.cold.push_back(static_cast<SwitchId>(k));
  }
  r.trigger = !r.violated_links.empty() ||
              std::any_of(state.path_latency.begin(), state.path_latency.end(),
                          [&](double l) { return l > intents.l_thr_s; });
  return r;
}

std::vector<double> normalize_state(const NetworkState& state, const NormalizationBounds& b) {
  std::vector<double> out;
  out.reserve(state.dimension());
  auto put = [&](double v) { out.push_back(std::clamp(v, 0.0, 1.0)); };
  for (double u : state.link_utilization) put(u / b.utilization_max);
  for (double l : state.path_latency) put(l / b.latency_max_s);
  for (double t : state.temperature) put((t - b.temp_min_c) / (b.temp_max_c - b.temp_min_c));
  return out;
}

KnowledgeBase::KnowledgeBase(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("knowledge base capacity must be >= 1");
}

void KnowledgeBase::record(NetworkState state) {
  if (!records_.empty() && state.t < records_.back().t)
    throw OutOfOrderRecord("knowledge base records must be time-ordered");
  if (records_.size() == capacity_) records_.pop_front();
  records_.push_back(std::move(state));
}

std::vector<NetworkState> KnowledgeBase::window(double t0, double t1) const {
  std::vector<NetworkState> out;
  auto lo = std::lower_bound(records_.begin(), records_.end(), t0,
                             [](const NetworkState& s, double t) { return s.t < t; });
  for (auto it = lo; it != records_.end() && it->t <= t1; ++it) out.push_back(*it);
  return out;
}

}  // namespace autoheal
