#include "autoheal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "autoheal/baseline.hpp"
#include "json.hpp"

namespace autoheal {

using nlohmann::json;

namespace {

template <typename T>
void take(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

std::string_view thermal_mode_name(InternalModel m) {
  return m == InternalModel::PaperLiteral ? "literal" : "corrected";
}

}  // namespace

std::string serialize_config(const AppConfig& c) {
  const auto& d = c.dqn;
  json j{
      {"topology", c.topology},
      {"tick_s", c.sim.tick_s},
      {"intents",
       {{"u_thr", c.sim.intents.u_thr},
        {"l_thr_ms", c.sim.intents.l_thr_s * 1e3},
        {"temp_min_c", c.sim.intents.temp_min_c},
        {"temp_max_c", c.sim.intents.temp_max_c}}},
      {"thermal_mode", thermal_mode_name(c.sim.thermal_mode)},
      {"gain_scale", c.gain_scale},
      {"loss_per_degree", c.sim.loss_per_degree},
      {"throttle_factor", c.sim.throttle_factor},
      {"p_rack", c.sim.p_rack},
      {"traffic",
       {{"sv_rate_bps", c.traffic.sv_rate_bps},
        {"goose_rate_bps", c.traffic.goose_rate_bps},
        {"operational_rate_bps", c.traffic.operational_rate_bps},
        {"condition_rate_bps", c.traffic.condition_rate_bps},
        {"meteo_rate_bps", c.traffic.meteo_rate_bps},
        {"maintenance_rate_bps", c.traffic.maintenance_rate_bps},
        {"bulk_rate_bps", c.traffic.bulk_rate_bps},
        {"flash_fanin", c.traffic.flash_fanin},
        {"monitored_pairs", c.traffic.monitored_pairs}}},
      {"dqn",
       {{"gamma", d.gamma},
        {"learning_rate", d.learning_rate},
        {"adam_beta1", d.adam_beta1},
        {"adam_beta2", d.adam_beta2},
        {"adam_epsilon", d.adam_epsilon},
        {"epsilon_start", d.epsilon_start},
        {"epsilon_floor", d.epsilon_floor},
        {"epsilon_decay", d.epsilon_decay},
        {"batch_size", d.batch_size},
        {"replay_capacity", d.replay_capacity},
        {"hidden_units", d.hidden_units},
        {"hidden_layers", d.hidden_layers},
        {"target_sync_steps", d.target_sync_steps},
        {"target_sync_episodes", d.target_sync_episodes},
        {"episodes", d.episodes},
        {"max_decisions", d.max_decisions},
        {"recovery_ticks", d.recovery_ticks},
        {"alpha", d.alpha},
        {"beta", d.beta},
        {"capacity_term", d.capacity_term},
        {"seed", d.seed}}},
      {"k_paths", c.k_paths},
      {"detection_delay_s", c.detection_delay_s},
      {"eval_epsilon", c.eval_epsilon},
      {"duration_s", c.duration_s},
      {"train_duration_s", c.train_duration_s},
      {"trace_stride", c.trace_stride},
      {"kb_stride", c.kb_stride},
      {"train_mix", c.train_mix},
  };
  return j.dump(2);
}

AppConfig parse_config(std::string_view text) {
  const auto j = json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  AppConfig c;
  take(j, "topology", c.topology);
  take(j, "tick_s", c.sim.tick_s);
  if (j.contains("intents")) {
    const auto& i = j.at("intents");
    take(i, "u_thr", c.sim.intents.u_thr);
    if (i.contains("l_thr_ms")) c.sim.intents.l_thr_s = i.at("l_thr_ms").get<double>() * 1e-3;
    take(i, "temp_min_c", c.sim.intents.temp_min_c);
    take(i, "temp_max_c", c.sim.intents.temp_max_c);
  }
  if (j.contains("thermal_mode")) {
    const auto m = j.at("thermal_mode").get<std::string>();
    if (m == "literal") c.sim.thermal_mode = InternalModel::PaperLiteral;
    else if (m == "corrected") c.sim.thermal_mode = InternalModel::FirstOrderCorrected;
    else throw std::invalid_argument("thermal_mode must be literal or corrected");
  }
  take(j, "gain_scale", c.gain_scale);
  take(j, "loss_per_degree", c.sim.loss_per_degree);
  take(j, "throttle_factor", c.sim.throttle_factor);
  take(j, "p_rack", c.sim.p_rack);
  if (j.contains("traffic")) {
    const auto& t = j.at("traffic");
    take(t, "sv_rate_bps", c.traffic.sv_rate_bps);
    take(t, "goose_rate_bps", c.traffic.goose_rate_bps);
    take(t, "operational_rate_bps", c.traffic.operational_rate_bps);
    take(t, "condition_rate_bps", c.traffic.condition_rate_bps);
    take(t, "meteo_rate_bps", c.traffic.meteo_rate_bps);
    take(t, "maintenance_rate_bps", c.traffic.maintenance_rate_bps);
    take(t, "bulk_rate_bps", c.traffic.bulk_rate_bps);
    take(t, "flash_fanin", c.traffic.flash_fanin);
    take(t, "monitored_pairs", c.traffic.monitored_pairs);
  }
  if (j.contains("dqn")) {
    const auto& q = j.at("dqn");
    auto& d = c.dqn;
    take(q, "gamma", d.gamma);
    take(q, "learning_rate", d.learning_rate);
    take(q, "adam_beta1", d.adam_beta1);
    take(q, "adam_beta2", d.adam_beta2);
    take(q, "adam_epsilon", d.adam_epsilon);
    take(q, "epsilon_start", d.epsilon_start);
    take(q, "epsilon_floor", d.epsilon_floor);
    take(q, "epsilon_decay", d.epsilon_decay);
    take(q, "batch_size", d.batch_size);
    take(q, "replay_capacity", d.replay_capacity);
    take(q, "hidden_units", d.hidden_units);
    take(q, "hidden_layers", d.hidden_layers);
    take(q, "target_sync_steps", d.target_sync_steps);
    take(q, "target_sync_episodes", d.target_sync_episodes);
    take(q, "episodes", d.episodes);
    take(q, "max_decisions", d.max_decisions);
    take(q, "recovery_ticks", d.recovery_ticks);
    take(q, "alpha", d.alpha);
    take(q, "beta", d.beta);
    take(q, "capacity_term", d.capacity_term);
    take(q, "seed", d.seed);
  }
  take(j, "k_paths", c.k_paths);
  take(j, "detection_delay_s", c.detection_delay_s);
  take(j, "eval_epsilon", c.eval_epsilon);
  take(j, "duration_s", c.duration_s);
  take(j, "train_duration_s", c.train_duration_s);
  take(j, "trace_stride", c.trace_stride);
  take(j, "kb_stride", c.kb_stride);
  take(j, "train_mix", c.train_mix);

  c.sim.intents.validate();
  c.dqn.validate();
  if (c.k_paths == 0) throw std::invalid_argument("k_paths must be >= 1");
  if (c.detection_delay_s < 0.0) throw std::invalid_argument("detection delay must be >= 0");
  if (c.trace_stride == 0 || c.kb_stride == 0) throw std::invalid_argument("strides must be >= 1");
  for (const auto& id : c.train_mix) load_scenario(id);
  return c;
}

AppConfig load_config() {
  const char* path = std::getenv("AUTOHEAL_CONFIG");
  if (!path || !*path) return {};
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string("cannot read AUTOHEAL_CONFIG file ") + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t config_hash(const AppConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : serialize_config(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

World make_world(const AppConfig& cfg) {
  World w;
  w.graph = load_topology(cfg.topology);
  const auto report = validate_graph(w.graph);
  if (!report.ok()) {
    std::string msg = "invalid topology";
    for (const auto& f : report.findings) msg += "; " + f;
    throw InvalidSpec(msg);
  }
  w.roster = make_roster(w.graph, cfg.traffic);
  w.ecmp = ecmp_assign(w.graph, w.roster.flows);
  return w;
}

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::Baseline: return "baseline";
    case Policy::Agent: return "ttdqsha";
    case Policy::Untrained: return "untrained";
  }
  return "?";
}

Policy policy_from_string(std::string_view s) {
  if (s == "baseline") return Policy::Baseline;
  if (s == "ttdqsha" || s == "agent") return Policy::Agent;
  if (s == "untrained") return Policy::Untrained;
  throw std::invalid_argument("unknown policy: " + std::string(s));
}

std::string_view to_string(RecoveryClass c) {
  switch (c) {
    case RecoveryClass::Full: return "full";
    case RecoveryClass::Partial: return "partial";
    case RecoveryClass::None: return "none";
  }
  return "?";
}

Resilience resilience_metrics(std::span<const TracePoint> trace, double t_d, std::size_t clean_ticks) {
  if (trace.empty()) throw EmptyTrace("trace is empty");
  if (clean_ticks == 0) throw std::invalid_argument("clean_ticks must be >= 1");
  const double eps = 1e-9;
  Resilience r;
  std::size_t i0 = 0;
  double pre_sum = 0.0;
  while (i0 < trace.size() && trace[i0].t < t_d - eps) pre_sum += trace[i0++].y;
  r.y_pre = i0 > 0 ? pre_sum / static_cast<double>(i0) : trace.front().y;
  if (i0 == trace.size()) {
    r.y_min = r.y_pre;
    return r;
  }

  std::size_t start = i0, streak = 0;
  std::optional<std::size_t> recovered;
  for (std::size_t i = i0; i < trace.size(); ++i) {
    if (trace[i].violated) {
      streak = 0;
      continue;
    }
    if (streak++ == 0) start = i;
    if (streak >= clean_ticks) {
      recovered = start;
      break;
    }
  }

  const std::size_t end = recovered ? *recovered + 1 : trace.size();
  r.y_min = trace[i0].y;
  for (std::size_t i = i0; i < end; ++i) r.y_min = std::min(r.y_min, trace[i].y);
  r.dy = std::max(0.0, r.y_pre - r.y_min);
  if (!recovered) {
    r.t_recovery = trace.back().t;
    r.dt = std::max(0.0, trace.back().t - t_d);
    r.cls = RecoveryClass::None;
    return r;
  }
  r.t_recovery = trace[*recovered].t;
  r.dt = std::max(0.0, r.t_recovery - t_d);
  double post = 0.0;
  for (std::size_t i = *recovered; i < trace.size(); ++i) post += trace[i].y;
  post /= static_cast<double>(trace.size() - *recovered);
  r.cls = post >= 0.98 * r.y_pre ? RecoveryClass::Full : RecoveryClass::Partial;
  return r;
}

MetricsRecord compute_metrics(std::span<const TracePoint> trace, double t_d, std::span<const double> reactions,
                              const QoSIntents& intents, std::size_t clean_ticks) {
  const auto res = resilience_metrics(trace, t_d, clean_ticks);
  MetricsRecord m;
  double lat = 0.0, offered = 0.0, delivered = 0.0;
  std::size_t post = 0, post_ok = 0;
  for (const auto& p : trace) {
    lat += p.latency_s;
    offered += p.offered_bps;
    delivered += p.delivered_bps;
    if (p.violated) ++m.violation_ticks;
    if (res.cls != RecoveryClass::None && p.t >= res.t_recovery) {
      ++post;
      if (p.max_latency_s <= intents.l_thr_s) ++post_ok;
    }
  }
  const double n = static_cast<double>(trace.size());
  m.latency_ms_mean = lat / n * 1e3;
  m.loss_pct = offered > 0.0 ? 100.0 * std::max(0.0, offered - delivered) / offered : 0.0;
  m.throughput_mbps = delivered / n / 1e6;
  m.reaction_s = reactions.empty() ? 0.0
                                   : std::accumulate(reactions.begin(), reactions.end(), 0.0) /
                                         static_cast<double>(reactions.size());
  m.recovery_s = res.dt;
  m.dy = res.dy;
  m.recovery = res.cls;
  m.post_recovery_latency_ok = post ? static_cast<double>(post_ok) / static_cast<double>(post) : 1.0;
  return m;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a * 0x9e3779b97f4a7c15ULL + b + 0x632be59bd9b4e019ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

dqn::QNetwork make_network(const World& world, const AppConfig& cfg, std::uint64_t seed) {
  const std::size_t eta = world.graph.link_count() + world.roster.monitored.size() + world.graph.switch_count();
  return dqn::QNetwork(layer_sizes(eta, dqn::action_count(cfg.k_paths), cfg.dqn), seed);
}

RunResult run_episode(const World& world, const AppConfig& cfg, const ScenarioConfig& sc, Policy policy,
                      dqn::QNetwork* net, std::uint64_t seed, const RunOptions& opts) {
  const double duration = opts.duration_s > 0.0 ? opts.duration_s : (cfg.duration_s > 0.0 ? cfg.duration_s : sc.duration_s);
  const double tick = cfg.sim.tick_s;
  const auto n = static_cast<std::uint64_t>(std::llround(duration / tick));
  if (n == 0) throw EmptyTrace("run duration shorter than one tick");
  if (policy != Policy::Baseline && !net) throw MissingWeights("agent policy needs a network");

  RunResult out;
  out.t_disruption = sc.disruption_time(duration);

  FlashProcess flash(sc.flash, mix_seed(seed, 1));
  flash.schedule(out.t_disruption, sc.flash.duration_s);
  SimConfig simcfg = cfg.sim;
  simcfg.thermal = sc.thermal;
  simcfg.thermal.gain_scale = cfg.gain_scale;
  simcfg.env_c = sc.nominal_env_c;
  simcfg.p_rack = sc.p_rack;
  simcfg.c_hvac = 1.0;
  Simulator sim(world.graph, world.roster, world.ecmp, std::move(flash), simcfg);

  BaselineController baseline(cfg.detection_delay_s);
  std::optional<AgentController> agent;
  if (policy != Policy::Baseline) {
    agent.emplace(sim, *net, mix_seed(seed, 2), cfg.k_paths);
    agent->set_epsilon(opts.epsilon);
    agent->attach(opts.learner);
  }
  KnowledgeBase kb;

  if (opts.keep_trace) out.trace.reserve(n);
  bool onset = false;
  std::size_t clean = 0;
  for (std::uint64_t i = 1; i <= n; ++i) {
    sim.step();
    const double t = sim.now();
    if (!onset && t >= out.t_disruption - 1e-9) {
      sim.set_environment(sc.onset_env_c, sc.onset_c_hvac);
      onset = true;
    }
    if (agent) agent->on_tick(sim);
    else baseline.on_tick(sim);

    if (opts.observer) opts.observer(sim);
    if (i % cfg.kb_stride == 0) kb.record(sim.observe());
    if ((i & 1023) == 0 && !sim.thermal().finite())
      throw SimulationDiverged("non-finite temperature at t=" + std::to_string(t));

    const auto& s = sim.sample();
    if (opts.keep_trace) {
      TracePoint p;
      p.t = t;
      p.y = s.demand_bps > 0.0 ? s.delivered_bps / s.demand_bps : 1.0;
      p.latency_s = s.mean_latency_s;
      p.max_latency_s = s.max_latency_s;
      p.max_utilization = s.max_utilization;
      p.delivered_bps = s.delivered_bps;
      p.offered_bps = s.offered_bps;
      p.violated = s.violated;
      p.throttled = s.throttled;
      out.trace.push_back(p);
    }
    if (opts.stop_on_recovery && onset) {
      clean = s.violated ? 0 : clean + 1;
      if (clean >= cfg.dqn.recovery_ticks) {
        out.recovered = true;
        break;
      }
    }
    if (agent && opts.max_decisions && agent->decisions() >= opts.max_decisions) break;
  }
  if (!sim.thermal().finite()) throw SimulationDiverged("non-finite temperature at end of run");
  if (agent) {
    agent->flush(sim);
    out.decisions = agent->decisions();
    out.transitions = agent->transitions();
    out.reward_sum = agent->reward_sum();
    out.loss_sum = agent->loss_sum();
    out.loss_count = agent->loss_count();
    for (const auto& e : sim.applied())
      if (e.at_onset) out.reactions.push_back(e.t_applied - e.t_decide);
  } else {
    out.reactions = baseline.reactions();
  }
  out.actuation = sim.applied();
  out.kb_records = kb.size();
  out.clamp_warnings = sim.clamp_warnings();
  if (opts.keep_trace)
    out.metrics = compute_metrics(out.trace, out.t_disruption, out.reactions, cfg.sim.intents, cfg.dqn.recovery_ticks);
  return out;
}

TrainResult train(const World& world, const AppConfig& cfg, std::span<const std::string> mix, std::size_t episodes,
                  std::uint64_t seed, const std::function<void(const EpisodeStats&)>& progress) {
  if (mix.empty()) throw std::invalid_argument("empty training mix");
  std::vector<ScenarioConfig> scenarios;
  for (const auto& id : mix) scenarios.push_back(load_scenario(id));
  dqn::DQNConfig dcfg = cfg.dqn;
  dcfg.seed = seed;
  TrainResult out;
  out.net = make_network(world, cfg, seed);
  Learner learner(out.net, dcfg);
  out.curves.reserve(episodes);
  for (std::size_t k = 0; k < episodes; ++k) {
    const auto& sc = scenarios[k % scenarios.size()];
    RunOptions opts;
    opts.duration_s = cfg.train_duration_s > 0.0 ? cfg.train_duration_s : sc.train_duration_s;
    opts.keep_trace = false;
    opts.stop_on_recovery = true;
    opts.max_decisions = dcfg.max_decisions;
    opts.epsilon = dqn::epsilon_at(k, dcfg);
    opts.learner = &learner;
    const auto r = run_episode(world, cfg, sc, Policy::Agent, &out.net, mix_seed(seed, k + 1000), opts);
    if (dcfg.target_sync_episodes > 0 && (k + 1) % dcfg.target_sync_episodes == 0)
      dqn::sync_target(out.net, learner.target);
    EpisodeStats st;
    st.episode = k;
    st.scenario = sc.id;
    st.reward = r.reward_sum;
    st.epsilon = opts.epsilon;
    st.mean_loss = r.loss_count ? r.loss_sum / static_cast<double>(r.loss_count) : 0.0;
    st.decisions = r.decisions;
    st.recovered = r.recovered;
    out.curves.push_back(st);
    if (progress) progress(st);
  }
  out.grad_steps = learner.grad_steps;
  return out;
}

void write_curves_csv(std::ostream& out, std::span<const EpisodeStats> curves) {
  out << "episode,scenario,reward,epsilon,mean_loss,decisions,recovered\n";
  char buf[256];
  for (const auto& c : curves) {
    std::snprintf(buf, sizeof buf, "%zu,%s,%.6f,%.6f,%.8f,%zu,%d\n", c.episode, c.scenario.c_str(), c.reward,
                  c.epsilon, c.mean_loss, c.decisions, c.recovered ? 1 : 0);
    out << buf;
  }
}

double t_critical_95(std::size_t dof) {
  static constexpr double kTable[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof == 0) throw std::invalid_argument("need at least one degree of freedom");
  if (dof <= std::size(kTable)) return kTable[dof - 1];
  if (dof <= 40) return 2.021;
  if (dof <= 60) return 2.000;
  if (dof <= 120) return 1.980;
  return 1.960;
}

std::optional<double> ci95(std::span<const double> xs) {
  if (xs.size() < 2) return std::nullopt;
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return t_critical_95(xs.size() - 1) * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

Evaluation evaluate(const World& world, const AppConfig& cfg, std::span<const Policy> policies,
                    std::span<const std::string> scenarios, std::span<const std::uint64_t> seeds,
                    const dqn::QNetwork* weights, std::size_t jobs) {
  if (policies.empty() || scenarios.empty() || seeds.empty()) throw std::invalid_argument("nothing to evaluate");
  const bool needs = std::find(policies.begin(), policies.end(), Policy::Agent) != policies.end();
  if (needs && (!weights || weights->layer_sizes().empty())) throw MissingWeights("agent policy needs trained weights");
  const auto untrained = make_network(world, cfg, mix_seed(cfg.dqn.seed, 0xbadc0ffee));

  std::vector<ScenarioConfig> presets;
  for (const auto& id : scenarios) presets.push_back(load_scenario(id));

  Evaluation ev;
  for (auto p : policies)
    for (std::size_t s = 0; s < presets.size(); ++s)
      for (auto seed : seeds) ev.runs.push_back({p, presets[s].id, seed, {}, {}});

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < ev.runs.size();) {
      auto& run = ev.runs[i];
      try {
        const auto& sc = *std::find_if(presets.begin(), presets.end(), [&](const auto& x) { return x.id == run.scenario; });
        std::optional<dqn::QNetwork> net;
        if (run.policy == Policy::Agent) net = *weights;
        if (run.policy == Policy::Untrained) net = untrained;
        RunOptions opts;
        opts.epsilon = cfg.eval_epsilon;
        auto r = run_episode(world, cfg, sc, run.policy, net ? &*net : nullptr, run.seed, opts);
        run.metrics = r.metrics;
        run.reactions = std::move(r.reactions);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, ev.runs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  for (auto p : policies)
    for (const auto& sc : presets) {
      AggregateRow row;
      row.policy = p;
      row.scenario = sc.id;
      std::vector<double> lat;
      for (const auto& run : ev.runs) {
        if (run.policy != p || run.scenario != sc.id) continue;
        const auto& m = run.metrics;
        lat.push_back(m.latency_ms_mean);
        row.loss_pct += m.loss_pct;
        row.throughput_mbps += m.throughput_mbps;
        row.reaction_s += m.reaction_s;
        row.recovery_s += m.recovery_s;
        row.dy += m.dy;
        ++row.runs;
      }
      const double k = static_cast<double>(row.runs);
      row.latency_ms_mean = std::accumulate(lat.begin(), lat.end(), 0.0) / k;
      row.latency_ms_ci = ci95(lat);
      row.loss_pct /= k;
      row.throughput_mbps /= k;
      row.reaction_s /= k;
      row.recovery_s /= k;
      row.dy /= k;
      ev.rows.push_back(row);
    }
  return ev;
}

void write_results_csv(std::ostream& out, std::span<const AggregateRow> rows) {
  out << "policy,tc,latency_ms_mean,latency_ms_ci,loss_pct,throughput_mbps,reaction_s,recovery_s,dy\n";
  char buf[512];
  for (const auto& r : rows) {
    char ci[32] = "n/a";
    if (r.latency_ms_ci) std::snprintf(ci, sizeof ci, "%.6f", *r.latency_ms_ci);
    std::snprintf(buf, sizeof buf, "%s,%s,%.6f,%s,%.6f,%.6f,%.6f,%.6f,%.6f\n", std::string(to_string(r.policy)).c_str(),
                  r.scenario.c_str(), r.latency_ms_mean, ci, r.loss_pct, r.throughput_mbps, r.reaction_s, r.recovery_s,
                  r.dy);
    out << buf;
  }
}

std::optional<double> improvement_pct(const Evaluation& ev, std::span<const std::string> scenarios) {
  double base = 0.0, agent = 0.0;
  std::size_t nb = 0, na = 0;
  for (const auto& r : ev.runs) {
    if (std::find(scenarios.begin(), scenarios.end(), r.scenario) == scenarios.end()) continue;
    if (r.policy == Policy::Baseline) {
      base += r.metrics.recovery_s;
      ++nb;
    } else if (r.policy == Policy::Agent) {
      agent += r.metrics.recovery_s;
      ++na;
    }
  }
  if (!nb || !na) return std::nullopt;
  base /= static_cast<double>(nb);
  agent /= static_cast<double>(na);
  if (base <= 0.0) return std::nullopt;
  return 100.0 * (base - agent) / base;
}

void write_summary(std::ostream& out, const Evaluation& ev) {
  char buf[512];
  out << "policy     tc    latency_ms        loss_%   thr_Mb/s  react_s   recov_s   dy\n";
  for (const auto& r : ev.rows) {
    char ci[32] = "n/a";
    if (r.latency_ms_ci) std::snprintf(ci, sizeof ci, "%.4f", *r.latency_ms_ci);
    std::snprintf(buf, sizeof buf, "%-10s %-5s %7.4f +- %-7s %8.4f %9.2f %8.4f %9.4f %7.4f\n",
                  std::string(to_string(r.policy)).c_str(), r.scenario.c_str(), r.latency_ms_mean, ci, r.loss_pct,
                  r.throughput_mbps, r.reaction_s, r.recovery_s, r.dy);
    out << buf;
  }
  std::vector<std::string> stress;
  for (int i = 5; i <= 9; ++i) stress.push_back("TC" + std::to_string(i));
  if (auto imp = improvement_pct(ev, stress)) {
    std::snprintf(buf, sizeof buf, "recovery-time improvement over baseline, TC5-TC9: %.2f%%\n", *imp);
    out << buf;
  }
  out << "external reference (reported, not simulated):\n"
         "  anfis   delay 0.65-2.4 ms  utilization 70.1%  loss 1.7%\n"
         "  dtpro   delay 0.9-3.6 ms   utilization 68.5%  loss 1.4%\n";
}

void write_trace_jsonl(std::ostream& out, std::span<const TracePoint> trace, std::size_t stride, double t_d) {
  if (stride == 0) throw std::invalid_argument("stride must be >= 1");
  out << json{{"event", "disruption"}, {"t", t_d}}.dump() << '\n';
  for (std::size_t i = 0; i < trace.size(); i += stride) {
    const auto& p = trace[i];
    out << json{{"t", p.t},
                {"y", p.y},
                {"latency_ms", p.latency_s * 1e3},
                {"max_latency_ms", p.max_latency_s * 1e3},
                {"max_utilization", p.max_utilization},
                {"delivered_mbps", p.delivered_bps / 1e6},
                {"violated", p.violated},
                {"throttled", p.throttled}}
               .dump()
        << '\n';
  }
}

void write_actuation_jsonl(std::ostream& out, std::span<const ActuationEvent> events) {
  for (const auto& e : events) out << actuation_log_line(e) << '\n';
}

}  // namespace autoheal
