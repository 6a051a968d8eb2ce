#include <random>

#include "autoheal/harness.hpp"
#include "autoheal/knowledge.hpp"
#include "doctest.h"

using namespace autoheal;

namespace {

NetworkState state(std::vector<double> u, std::vector<double> l, std::vector<double> temp, double t = 0.0) {
  NetworkState s;
  s.link_utilization = std::move(u);
  s.path_latency = std::move(l);
  s.temperature = std::move(temp);
  s.t = t;
  return s;
}

Simulator idle_sim(const World& w) {
  SimConfig cfg;
  return Simulator(w.graph, w.roster, w.ecmp, FlashProcess(FlashEventConfig{}, 1), cfg);
}

}  // namespace

TEST_SUITE("knowledge") {

TEST_CASE("observation dimension on the wpp fabric") {
  const auto w = make_world(AppConfig{});
  CHECK(w.roster.monitored.size() == 6);
  const auto sim = idle_sim(w);
  const auto s = sim.observe();
  CHECK(s.dimension() == 78 + 6 + 40);
  CHECK(s.flatten().size() == 124);
  CHECK(sim.normalized_observation().size() == 124);
}

TEST_CASE("observing twice without a step is pure") {
  const auto w = make_world(AppConfig{});
  const auto sim = idle_sim(w);
  const auto a = sim.observe(), b = sim.observe();
  CHECK(a.flatten() == b.flatten());
  CHECK(a.t == b.t);
}

TEST_CASE("idle network observation") {
  const auto g = load_topology("small");
  TrafficMatrix tm;
  tm.link_utilization.assign(g.link_count(), 0.0);
  const Path p{4, 0, 5};
  tm.directed_utilization.assign(2 * g.link_count(), 0.0);
  tm.path_latency.push_back(path_latency(g, p, tm.directed_utilization));
  const std::vector<double> temps(g.switch_count(), 29.4);
  const auto s = observe(tm, temps, 0.5);
  for (double u : s.link_utilization) CHECK(u == 0.0);
  CHECK(s.path_latency[0] == doctest::Approx(g.path_propagation(p)));
  CHECK(s.temperature == temps);
}

TEST_CASE("knowledge base order and eviction") {
  KnowledgeBase kb(2);
  kb.record(state({0.1}, {}, {}, 1.0));
  kb.record(state({0.2}, {}, {}, 2.0));
  kb.record(state({0.3}, {}, {}, 3.0));
  CHECK(kb.size() == 2);
  CHECK(kb.latest()->link_utilization[0] == 0.3);
  CHECK(kb.records().front().t == 2.0);
  CHECK(kb.window(10.0, 20.0).empty());
  CHECK(kb.window(2.0, 3.0).size() == 2);
  CHECK_THROWS_AS(kb.record(state({}, {}, {}, 0.5)), OutOfOrderRecord);

  KnowledgeBase three(5);
  for (int i = 0; i < 3; ++i) three.record(state({double(i)}, {}, {}, double(i)));
  CHECK(three.latest()->t == 2.0);
}

TEST_CASE("eviction keeps time order under random pushes") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dt(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> cap(1, 20);
  for (int trial = 0; trial < 50; ++trial) {
    KnowledgeBase kb(cap(rng));
    double t = 0.0;
    for (int i = 0; i < 100; ++i) {
      t += dt(rng);
      kb.record(state({}, {}, {}, t));
      for (std::size_t j = 1; j < kb.size(); ++j) REQUIRE(kb.records()[j - 1].t <= kb.records()[j].t);
      CHECK(kb.latest()->t == t);
    }
  }
}

TEST_CASE("violation checks") {
  QoSIntents q;
  auto r = check_violations(state({0.85}, {}, {}), q);
  CHECK(r.trigger);
  CHECK(r.violated_links == std::vector<LinkId>{0});

  r = check_violations(state({0.3, 0.2}, {0.535e-3}, {30.0, 31.0}), q);
  CHECK_FALSE(r.trigger);

  r = check_violations(state({0.3}, {1e-3}, {58.0, 30.0}), q);
  CHECK_FALSE(r.trigger);
  CHECK(r.hot == std::vector<SwitchId>{0});
  CHECK(r.thermal_alarm());
}

TEST_CASE("violation check is monotone") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0), l(0.0, 5e-3), inc(0.0, 0.2);
  QoSIntents q;
  for (int trial = 0; trial < 500; ++trial) {
    auto s = state({u(rng), u(rng), u(rng)}, {l(rng), l(rng)}, {30.0});
    const bool before = check_violations(s, q).trigger;
    s.link_utilization[trial % 3] += inc(rng);
    s.path_latency[trial % 2] += inc(rng) * 1e-3;
    if (before) CHECK(check_violations(s, q).trigger);
  }
}

TEST_CASE("normalization") {
  const auto v = normalize_state(state({0.75}, {10e-3}, {40.0}));
  CHECK(v[0] == doctest::Approx(0.5));
  CHECK(v[1] == doctest::Approx(1.0));
  CHECK(v[2] == doctest::Approx(0.5));

  NormalizationBounds identity{1.0, 1.0, 0.0, 1.0};
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto s = state({d(rng), d(rng)}, {d(rng)}, {d(rng)});
    CHECK(normalize_state(s, identity) == s.flatten());
    auto bigger = s;
    bigger.link_utilization[0] += 0.1;
    CHECK(normalize_state(bigger, {})[0] >= normalize_state(s, {})[0]);
  }
}

TEST_CASE("intents document") {
  const auto q = parse_intents(R"({"u_thr":0.7,"l_thr_ms":5})");
  CHECK(q.u_thr == 0.7);
  CHECK(q.l_thr_s == doctest::Approx(5e-3));
  CHECK(parse_intents(serialize_intents(q)).u_thr == 0.7);
  CHECK_THROWS(parse_intents(R"({"u_thr":1.7})"));
}

}
