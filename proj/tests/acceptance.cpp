// Acceptance checks, one line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "autoheal/baseline.hpp"
#include "autoheal/harness.hpp"
#include "fixtures.hpp"

using namespace autoheal;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> uniform(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

Outcome gradient_check() {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    dqn::QNetwork net({6, 24, 24, 4}, 1000 + trial);
    std::vector<dqn::Transition> items;
    for (std::size_t i = 0; i < 4; ++i) items.push_back({uniform(6, rng), i, 0.0, {}, true});
    std::vector<const dqn::Transition*> batch;
    for (const auto& t : items) batch.push_back(&t);
    const auto y = uniform(4, rng);
    const auto lg = dqn::td_loss_gradient(net, batch, y);
    const double h = 1e-6;
    for (std::size_t i = 0; i < net.params().size(); ++i) {
      const double keep = net.params()[i];
      net.params()[i] = keep + h;
      const double up = dqn::td_loss_gradient(net, batch, y).loss;
      net.params()[i] = keep - h;
      const double down = dqn::td_loss_gradient(net, batch, y).loss;
      net.params()[i] = keep;
      const double fd = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(fd - lg.grad[i]) / std::max({std::abs(fd), std::abs(lg.grad[i]), 1e-3}));
    }
  }
  return {worst < 1e-4, fmt("max relative error %.3g over 100 instances", worst)};
}

Outcome epsilon_schedule() {
  bool exact = true;
  std::size_t first_floor = 0;
  for (std::size_t k = 0; k <= 1500; ++k) {
    const double e = dqn::epsilon_at(k);
    exact = exact && e == std::max(0.01, std::pow(0.995, static_cast<double>(k)));
    if (!first_floor && e == 0.01) first_floor = k;
  }
  return {exact && first_floor == 919, fmt("exact %s, floor first reached at %zu", exact ? "yes" : "no", first_floor)};
}

Outcome thermal_oracle() {
  double worst = 0.0;
  for (const auto& id : scenario_ids()) {
    const auto p = load_scenario(id).thermal;
    const double u = 0.4;
    const auto eq = steady_state(p, 22.0, 0.5, 1.0, u);
    auto s = make_thermal_state(1, p, 22.0, 0.5, 1.0, u);
    s.ambient[0] += 3.0;
    s.internal[0] += 3.0;
    const std::vector<double> load{u};
    const double dt = 0.05;
    const auto steps = std::lround(5.0 * p.lambda_ambient_s / dt);
    for (long i = 0; i < steps; ++i) advance(s, p, load, dt);
    worst = std::max({worst, std::abs(s.ambient[0] - eq.ambient), std::abs(s.internal[0] - eq.internal)});
  }
  ThermalParams p;
  auto lit = make_thermal_state(1, p, 22.0, 0.5, 1.0, 0.4);
  const std::vector<double> load{0.4};
  bool rising = true;
  for (int i = 0; i < static_cast<int>(10 * p.lambda_sw_s / 0.5); ++i) {
    const double before = lit.internal[0];
    advance(lit, p, load, 0.5, InternalModel::PaperLiteral);
    rising = rising && lit.internal[0] > before;
  }
  const bool unbounded = rising && lit.internal[0] > 1000.0;
  return {worst < 0.1 && unbounded,
          fmt("max error after 5 lambda %.4f C over 9 rows; literal mode at %.0f C after 10 lambda_sw", worst,
              lit.internal[0])};
}

Outcome health_band(const World& w, const AppConfig& cfg, dqn::QNetwork& net) {
  const auto sc = load_scenario("TC1");
  double int_lo = 1e9, int_hi = -1e9, amb_lo = 1e9, amb_hi = -1e9;
  RunOptions opts;
  opts.keep_trace = false;
  opts.observer = [&](const Simulator& sim) {
    for (double t : sim.thermal().internal) {
      int_lo = std::min(int_lo, t);
      int_hi = std::max(int_hi, t);
    }
    for (double t : sim.thermal().ambient) {
      amb_lo = std::min(amb_lo, t);
      amb_hi = std::max(amb_hi, t);
    }
  };
  run_episode(w, cfg, sc, Policy::Baseline, nullptr, 42, opts);
  run_episode(w, cfg, sc, Policy::Agent, &net, 42, opts);
  const bool ok = int_lo >= 20.0 && int_hi <= 40.0 && amb_lo >= 18.0 && amb_hi <= 27.0;
  return {ok, fmt("internal [%.2f, %.2f] C, ambient [%.2f, %.2f] C over 600 s", int_lo, int_hi, amb_lo, amb_hi)};
}

Outcome gating(const World& w, const AppConfig& cfg, const dqn::QNetwork& trained) {
  auto net = trained;
  Learner learner(net, cfg.dqn);
  RunOptions opts;
  opts.learner = &learner;
  opts.epsilon = 1.0;
  const auto r = run_episode(w, cfg, load_scenario("TC1"), Policy::Agent, &net, 42, opts);
  const bool ok = r.metrics.violation_ticks == 0 && r.transitions == 0 && learner.replay.size() == 0 &&
                  r.actuation.empty();
  return {ok, fmt("violation ticks %zu, transitions %zu, actuation events %zu", r.metrics.violation_ticks,
                  r.transitions, r.actuation.size())};
}

Outcome routing_oracles() {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::size_t> nd(2, 8);
  std::size_t checked = 0, wrong = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = nd(rng);
    const auto g = fixtures::random_graph(n, 0.4, rng);
    const auto wts = propagation_weights(g);
    for (SwitchId s = 0; s < n; ++s) {
      for (SwitchId t = 0; t < n; ++t) {
        if (s == t) continue;
        const auto all = fixtures::all_simple_paths(g, s, t);
        const auto got = dijkstra(g, s, t, wts);
        ++checked;
        if (all.empty()) {
          wrong += got.has_value();
          continue;
        }
        double best = 1e300;
        for (const auto& p : all) best = std::min(best, g.path_propagation(p));
        if (!got || g.path_propagation(*got) != best) ++wrong;
      }
    }
  }
  const auto g = fixtures::make_graph(4, {{0, 1, 1.0}, {1, 3, 1.0}, {0, 2, 1.0}, {2, 3, 1.0}});
  std::vector<FlowSpec> flows;
  for (FlowId i = 0; i < 100; ++i) {
    FlowSpec f;
    f.id = i;
    f.src = 0;
    f.dst = 3;
    f.nominal_rate_bps = 1e6;
    flows.push_back(f);
  }
  const auto r = ecmp_assign(g, flows);
  const auto a = std::count(r.flow_paths.begin(), r.flow_paths.end(), Path{0, 1, 3});
  const auto b = std::count(r.flow_paths.begin(), r.flow_paths.end(), Path{0, 2, 3});
  const bool ok = wrong == 0 && a + b == 100 && a >= 40 && a <= 60;
  return {ok, fmt("dijkstra %zu/%zu pairs match; ecmp split %ld/%ld", checked - wrong, checked, long(a), long(b))};
}

Outcome reaction_envelope(const Evaluation& ev, const AppConfig& cfg) {
  double lo = 1e9, hi = 0.0, base_lo = 1e9;
  std::size_t agent_n = 0, base_n = 0;
  for (const auto& run : ev.runs) {
    for (double r : run.reactions) {
      if (run.policy == Policy::Agent) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        ++agent_n;
      } else {
        base_lo = std::min(base_lo, r);
        ++base_n;
      }
    }
  }
  const double tick = cfg.sim.tick_s;
  const bool ok = agent_n > 0 && base_n > 0 && lo >= kInstallDelayMin - 1e-12 &&
                  hi <= kInstallDelayMax + tick + 1e-12 && base_lo >= cfg.detection_delay_s - 1e-9;
  return {ok, fmt("agent %zu reactions in [%.4f, %.4f] ms; baseline %zu reactions, min %.3f s", agent_n, lo * 1e3,
                  hi * 1e3, base_n, base_lo)};
}

const AggregateRow* row(const Evaluation& ev, Policy p, const std::string& tc) {
  for (const auto& r : ev.rows)
    if (r.policy == p && r.scenario == tc) return &r;
  return nullptr;
}

Outcome headline(const Evaluation& ev, double train_s) {
  const std::vector<std::string> tcs{"TC5", "TC6", "TC7", "TC8", "TC9"};
  const auto imp = improvement_pct(ev, tcs);
  bool loss_ok = true;
  std::string losses;
  for (const auto& tc : tcs) {
    const auto* a = row(ev, Policy::Agent, tc);
    const auto* b = row(ev, Policy::Baseline, tc);
    if (!a || !b) return {false, "missing rows for " + tc};
    loss_ok = loss_ok && a->loss_pct < b->loss_pct;
    losses += fmt(" %s %.4f/%.3f", tc.c_str(), a->loss_pct, b->loss_pct);
  }
  const bool ok = imp && *imp >= 30.0 && loss_ok;
  return {ok, fmt("recovery improvement %.2f%%, loss%% agent/baseline:", imp ? *imp : 0.0) + losses +
                  fmt(" (training %.1f s)", train_s)};
}

Outcome latency_sla(const Evaluation& ev) {
  double worst = 1.0;
  for (const auto& run : ev.runs) {
    if (run.policy != Policy::Agent) continue;
    if (run.scenario > "TC6") continue;
    worst = std::min(worst, run.metrics.post_recovery_latency_ok);
  }
  return {worst >= 0.9, fmt("lowest share of post-recovery ticks within 3 ms over TC1-TC6: %.4f", worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const fs::path& dir, const fs::path& weights) {
  const std::string cli = AUTOHEAL_CLI;
  std::string first;
  for (int i = 0; i < 2; ++i) {
    const auto out = dir / ("results" + std::to_string(i) + ".csv");
    const std::string cmd = "\"" + cli + "\" evaluate --weights \"" + weights.string() + "\" --scenarios TC1..TC9" +
                            " --seeds 23,37 --jobs " + std::to_string(i + 1) + " --out \"" + out.string() +
                            "\" --summary \"" + (dir / "summary.txt").string() + "\"";
    if (std::system(cmd.c_str()) != 0) return {false, "evaluate invocation failed"};
    if (i == 0) first = slurp(out);
    else {
      const auto second = slurp(out);
      return {!first.empty() && first == second, fmt("%zu-byte CSVs %s", first.size(),
                                                     first == second ? "identical" : "differ")};
    }
  }
  return {false, "unreachable"};
}

Outcome replay_property() {
  dqn::ReplayBuffer buf(2000);
  for (int i = 0; i < 2001; ++i) buf.push({{double(i)}, 0, 0.0, {}, false});
  bool ordered = true;
  for (std::size_t i = 0; i < buf.size(); ++i) ordered = ordered && buf.items()[i].s[0] == double(i + 1);
  const bool first_gone = std::none_of(buf.items().begin(), buf.items().end(),
                                       [](const dqn::Transition& t) { return t.s[0] == 0.0; });
  return {buf.size() == 2000 && ordered && first_gone,
          fmt("size %zu, first absent %s, order preserved %s", buf.size(), first_gone ? "yes" : "no",
              ordered ? "yes" : "no")};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int n, const Outcome& o) {
    std::printf("criterion %d: %s %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  };
  try {
    report(1, gradient_check());
    report(2, epsilon_schedule());
    report(3, thermal_oracle());

    const AppConfig cfg;
    const World world = make_world(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    auto trained = train(world, cfg, cfg.train_mix, cfg.dqn.episodes, 42);
    const double train_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    report(4, health_band(world, cfg, trained.net));
    report(5, gating(world, cfg, trained.net));
    report(6, routing_oracles());

    const std::vector<Policy> policies{Policy::Baseline, Policy::Agent};
    const auto ids = scenario_ids();
    const std::vector<std::uint64_t> seeds{23, 37, 49, 71, 42};
    const std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    const auto ev = evaluate(world, cfg, policies, ids, seeds, &trained.net, jobs);
    report(7, reaction_envelope(ev, cfg));
    report(8, headline(ev, train_s));
    report(9, latency_sla(ev));

    const auto dir = fs::temp_directory_path() / "autoheal_acceptance";
    fs::create_directories(dir);
    const auto weights = dir / "weights.bin";
    dqn::save_weights(weights.string(), trained.net, 42, config_hash(cfg));
    report(10, determinism(dir, weights));
    report(11, replay_property());
    fs::remove_all(dir);
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
  return failed == 0 ? 0 : 1;
}
