#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "autoheal/dqn.hpp"
#include "doctest.h"

using namespace autoheal;
using namespace autoheal::dqn;

namespace {

/// Reference forward pass: plain loops over the documented parameter layout.
std::vector<double> oracle_forward(const QNetwork& net, std::vector<double> a) {
  const auto& sizes = net.layer_sizes();
  const auto p = net.params();
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const std::size_t in = sizes[l], out = sizes[l + 1];
    std::vector<double> z(out);
    for (std::size_t r = 0; r < out; ++r) {
      long double acc = p[off + out * in + r];
      for (std::size_t c = 0; c < in; ++c) acc += static_cast<long double>(p[off + r * in + c]) * a[c];
      z[r] = static_cast<double>(acc);
      if (l + 2 < sizes.size()) z[r] = std::max(0.0, z[r]);
    }
    off += out * in + out;
    a = std::move(z);
  }
  return a;
}

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

ViolationReport one_violated_pair() {
  ViolationReport r;
  r.violated_pairs = {0};
  r.pair_excess = {0.1};
  r.violated_links = {1};
  r.trigger = true;
  return r;
}

}  // namespace

TEST_SUITE("dqn") {

TEST_CASE("zero network outputs zero") {
  QNetwork net({5, 4, 3}, 1);
  for (auto& p : net.params()) p = 0.0;
  CHECK(net.forward(std::vector<double>(5, 0.7)) == std::vector<double>(3, 0.0));
}

TEST_CASE("one by one by one network") {
  QNetwork net({1, 1, 1}, 1);
  auto p = net.params();
  // [w0, b0, w1, b1]
  p[0] = 1.5;
  p[1] = -1.0;
  p[2] = 2.0;
  p[3] = 0.25;
  CHECK(net.forward(std::vector<double>{2.0})[0] == doctest::Approx(2.0 * (1.5 * 2.0 - 1.0) + 0.25));
  CHECK(net.forward(std::vector<double>{0.1})[0] == doctest::Approx(0.25));
}

TEST_CASE("forward matches reference evaluation") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    QNetwork net({7, 24, 24, 8}, 100 + trial);
    const auto x = random_vec(7, rng);
    const auto q = net.forward(x);
    const auto ref = oracle_forward(net, x);
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(q[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    CHECK(net.forward(x) == q);
  }
  QNetwork net({3, 2}, 1);
  CHECK_THROWS_AS(net.forward(std::vector<double>(4, 0.0)), std::invalid_argument);
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    QNetwork net({6, 24, 24, 4}, 300 + trial);
    std::vector<Transition> items;
    for (int i = 0; i < 4; ++i) items.push_back({random_vec(6, rng), static_cast<std::size_t>(i % 4), 0.0, {}, true});
    std::vector<const Transition*> batch;
    for (const auto& t : items) batch.push_back(&t);
    const auto y = random_vec(4, rng);
    const auto lg = td_loss_gradient(net, batch, y);
    const double h = 1e-6;
    for (std::size_t i = 0; i < net.params().size(); ++i) {
      const double keep = net.params()[i];
      net.params()[i] = keep + h;
      const double up = td_loss_gradient(net, batch, y).loss;
      net.params()[i] = keep - h;
      const double down = td_loss_gradient(net, batch, y).loss;
      net.params()[i] = keep;
      const double fd = (up - down) / (2 * h);
      const double scale = std::max({std::abs(fd), std::abs(lg.grad[i]), 1e-3});
      worst = std::max(worst, std::abs(fd - lg.grad[i]) / scale);
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("greedy and exploratory selection") {
  QNetwork net({2, 3, 8}, 9);
  auto report = one_violated_pair();
  const std::vector<Path> paths{{1, 2}, {1, 3, 2}, {1, 4, 2}, {1, 5, 2}};
  const auto space = build_action_space(report, paths, 4);
  REQUIRE(space.eligible_count() == 8);
  std::mt19937_64 rng(1);
  const std::vector<double> x{0.3, 0.6};
  const auto q = net.forward(x);
  const auto want = static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
  for (int i = 0; i < 20; ++i) CHECK(select_action(net, x, 0.0, space, rng).index == want);

  std::vector<int> counts(8, 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[select_action(net, x, 1.0, space, rng).index];
  double chi = 0.0;
  const double expect = draws / 8.0;
  for (int c : counts) chi += (c - expect) * (c - expect) / expect;
  CHECK(chi < 24.32);  // chi-square, 7 dof, p = 0.001
}

TEST_CASE("ties go to the lower index") {
  const std::vector<double> q{0.5, 2.0, 2.0, 1.0};
  const std::vector<char> all(4, 1);
  CHECK(greedy(q, all) == 1);
  const std::vector<char> some{1, 0, 1, 1};
  CHECK(greedy(q, some) == 2);
}

TEST_CASE("argmax ignores a constant shift") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  const std::vector<char> all(8, 1);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> q(8);
    for (auto& v : q) v = d(rng);
    auto shifted = q;
    const double c = d(rng);
    for (auto& v : shifted) v += c;
    CHECK(greedy(q, all) == greedy(shifted, all));
  }
}

TEST_CASE("reward values") {
  CHECK(reward(0.0, 0.0) == doctest::Approx(1.0));
  CHECK(reward(1.0, 1.0) == doctest::Approx(-0.002));
  CHECK(reward(0.4, 0.5) == doctest::Approx(1.0 - (0.657 * 0.4 + 0.345 * 0.5)));
  CHECK(reward(0.4, 0.5) == doctest::Approx(0.5647).epsilon(1e-3));
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double l = d(rng), u = d(rng);
    CHECK(reward(l, u) <= 1.0);
    CHECK(reward(l + 0.01, u) < reward(l, u));
    CHECK(reward(l, u + 0.01) < reward(l, u));
  }
}

TEST_CASE("replay buffer") {
  ReplayBuffer buf(2000);
  for (int i = 0; i < 2001; ++i) buf.push({{double(i)}, 0, 0.0, {}, false});
  CHECK(buf.size() == 2000);
  CHECK(buf.items().front().s[0] == 1.0);

  std::mt19937_64 rng(3);
  ReplayBuffer small(100);
  for (int i = 0; i < 31; ++i) small.push({{double(i)}, 0, 0.0, {}, false});
  CHECK_FALSE(small.sample(32, rng).has_value());

  ReplayBuffer three(10);
  for (int i = 0; i < 3; ++i) three.push({{double(i)}, 0, 0.0, {}, false});
  const auto s = three.sample(3, rng);
  REQUIRE(s.has_value());
  std::vector<double> seen;
  for (const auto* t : *s) seen.push_back(t->s[0]);
  std::sort(seen.begin(), seen.end());
  CHECK(seen == std::vector<double>{0.0, 1.0, 2.0});
}

TEST_CASE("td targets") {
  QNetwork target({1, 2}, 1);
  auto p = target.params();
  // W = [0, 0], b = [2, 1]: max Q is 2.
  p[0] = 0.0;
  p[1] = 0.0;
  p[2] = 2.0;
  p[3] = 1.0;
  const Transition terminal{{0.0}, 0, 0.5, {0.3}, true};
  const Transition step{{0.0}, 0, 0.5, {0.3}, false};
  const std::vector<const Transition*> b1{&terminal}, b2{&step};
  CHECK(td_targets(b1, target, 0.995)[0] == doctest::Approx(0.5));
  CHECK(td_targets(b2, target, 0.995)[0] == doctest::Approx(0.5 + 0.995 * 2.0));
  CHECK(0.5 + 0.995 * 2.0 == doctest::Approx(2.49));
  CHECK(td_targets(b2, target, 0.0)[0] == doctest::Approx(0.5));
}

TEST_CASE("training on a satisfied batch leaves the loss at zero") {
  QNetwork net({3, 4, 2}, 7);
  const std::vector<double> s{0.1, 0.2, 0.3};
  const double q0 = net.forward(s)[0];
  const Transition t{s, 0, q0, s, true};
  const std::vector<const Transition*> batch{&t};
  const auto before = net;
  DQNConfig cfg;
  Adam opt(net.params().size(), cfg);
  CHECK(train_step(net, net, batch, opt, cfg.gamma) == doctest::Approx(0.0));
  for (std::size_t i = 0; i < net.params().size(); ++i)
    CHECK(std::abs(net.params()[i] - before.params()[i]) <= cfg.learning_rate);
}

TEST_CASE("repeated steps on one batch do not raise the loss") {
  std::mt19937_64 rng(12);
  QNetwork net({6, 24, 24, 4}, 77);
  const QNetwork target = net;
  std::vector<Transition> items;
  for (int i = 0; i < 32; ++i)
    items.push_back({random_vec(6, rng), static_cast<std::size_t>(i % 4), random_vec(1, rng)[0], {}, true});
  std::vector<const Transition*> batch;
  for (const auto& t : items) batch.push_back(&t);
  DQNConfig cfg;
  Adam opt(net.params().size(), cfg);
  double prev = train_step(net, target, batch, opt, cfg.gamma);
  const double first = prev;
  for (int i = 0; i < 100; ++i) {
    const double loss = train_step(net, target, batch, opt, cfg.gamma);
    CHECK(loss <= prev + 1e-12);
    prev = loss;
  }
  CHECK(prev < first);
}

TEST_CASE("target sync") {
  QNetwork net({4, 5, 3}, 1), target({4, 5, 3}, 2);
  std::mt19937_64 rng(4);
  const auto x = random_vec(4, rng);
  CHECK(net.forward(x) != target.forward(x));
  sync_target(net, target);
  for (int i = 0; i < 10; ++i) {
    const auto y = random_vec(4, rng);
    CHECK(net.forward(y) == target.forward(y));
  }
}

TEST_CASE("exploration schedule") {
  CHECK(epsilon_at(0) == 1.0);
  CHECK(epsilon_at(100) == doctest::Approx(0.6058).epsilon(1e-4));
  const auto floor_at = static_cast<std::size_t>(std::ceil(std::log(0.01) / std::log(0.995)));
  CHECK(floor_at == 919);
  CHECK(epsilon_at(918) > 0.01);
  for (std::size_t k = 919; k < 1500; ++k) CHECK(epsilon_at(k) == 0.01);
}

TEST_CASE("action space") {
  const std::vector<Path> paths{{10, 0, 11}, {10, 1, 11}, {10, 2, 11}, {10, 3, 11}};
  auto report = one_violated_pair();
  auto space = build_action_space(report, paths, 4);
  CHECK(action_count(4) == 8);
  CHECK(space.size() == 8);
  CHECK(space.eligible_count() == 8);

  report.hot = {1};
  space = build_action_space(report, paths, 4);
  CHECK_FALSE(space.eligible[1]);
  CHECK(space.eligible_count() == 7);

  report.hot = {0, 1, 2, 3};
  space = build_action_space(report, paths, 4);
  CHECK(space.eligible_count() == 4);
  for (std::size_t i = 4; i < 8; ++i) CHECK(space.eligible[i]);

  for (std::size_t i = 0; i < 8; ++i) CHECK(encode_action(decode_action(i, 4), 4) == i);
  CHECK(decode_action(7, 4).kind == ActionKind::NoOp);
}

TEST_CASE("weights file round-trip") {
  QNetwork net({6, 24, 24, 8}, 5);
  const auto path = (std::filesystem::temp_directory_path() / "autoheal_weights_test.bin").string();
  save_weights(path, net, 42, 1234);
  WeightsHeader h;
  const auto back = load_weights(path, &h);
  std::filesystem::remove(path);
  CHECK(back == net);
  CHECK(h.seed == 42);
  CHECK(h.config_hash == 1234);
  CHECK(h.layer_sizes == net.layer_sizes());
}

TEST_CASE("config validation") {
  DQNConfig cfg;
  cfg.gamma = 1.0;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.replay_capacity = 10;
  CHECK_THROWS(cfg.validate());
}

}
