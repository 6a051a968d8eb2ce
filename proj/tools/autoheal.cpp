// Command-line front end: train, evaluate, run-scenario, validate-topology.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "autoheal/harness.hpp"
#include "autoheal/kernels.hpp"

using namespace autoheal;

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(std::stoull(item));
  if (out.empty()) throw std::invalid_argument("empty seed list");
  return out;
}

std::vector<Policy> parse_policies(const std::string& s) {
  std::vector<Policy> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(policy_from_string(item));
  if (out.empty()) throw std::invalid_argument("empty policy list");
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

dqn::QNetwork read_weights(const std::string& path, const AppConfig& cfg) {
  dqn::WeightsHeader h;
  auto net = dqn::load_weights(path, &h);
  if (h.config_hash != config_hash(cfg))
    std::cerr << "note: " << path << " was trained under a different configuration\n";
  return net;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold-triggered self-healing agent for spine-leaf industrial networks"};
  app.require_subcommand(1);
  std::string topology;
  std::string config_path;
  app.add_option("--topology", topology, "wpp | small | custom:<file>");
  app.add_option("--config", config_path, "JSON config (overrides AUTOHEAL_CONFIG)");

  auto* train_cmd = app.add_subcommand("train", "train the agent");
  std::string mix = "TC1..TC9", weights_out = "weights.bin", curves_out;
  std::size_t episodes = 0;
  std::uint64_t seed = 42;
  train_cmd->add_option("--scenario", mix, "scenario mix, e.g. TC1..TC9 or TC5,TC7");
  train_cmd->add_option("--episodes", episodes, "episodes (default from config)");
  train_cmd->add_option("--seed", seed);
  train_cmd->add_option("--out", weights_out, "weights file");
  train_cmd->add_option("--curves", curves_out, "training curves CSV");

  auto* eval_cmd = app.add_subcommand("evaluate", "evaluate policies over scenarios and seeds");
  std::string weights_in, scenarios = "TC1..TC9", seeds = "23,37,49,71,42", results_out = "results.csv";
  std::string policies = "baseline,ttdqsha", summary_out;
  std::size_t jobs = 1;
  eval_cmd->add_option("--weights", weights_in, "trained weights");
  eval_cmd->add_option("--scenarios", scenarios);
  eval_cmd->add_option("--seeds", seeds);
  eval_cmd->add_option("--policies", policies, "comma list of baseline, ttdqsha, untrained");
  eval_cmd->add_option("--out", results_out, "results CSV");
  eval_cmd->add_option("--summary", summary_out, "comparison summary file (default stdout)");
  eval_cmd->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);

  auto* run_cmd = app.add_subcommand("run-scenario", "simulate one scenario and write its traces");
  std::string run_id = "TC1", agent = "baseline", trace_out, actuation_out, run_weights;
  std::uint64_t run_seed = 42;
  double duration = 0.0;
  run_cmd->add_option("--id", run_id);
  run_cmd->add_option("--agent", agent, "baseline | ttdqsha | untrained");
  run_cmd->add_option("--weights", run_weights);
  run_cmd->add_option("--seed", run_seed);
  run_cmd->add_option("--duration", duration, "seconds (default: scenario)");
  run_cmd->add_option("--trace", trace_out, "tick trace JSONL");
  run_cmd->add_option("--actuation", actuation_out, "actuation log JSONL");

  auto* topo_cmd = app.add_subcommand("validate-topology", "check a topology and print its summary");
  std::string dump;
  topo_cmd->add_option("--dump", dump, "write the graph as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    AppConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error("cannot read " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg = parse_config(ss.str());
    } else {
      cfg = load_config();
    }
    if (!topology.empty()) cfg.topology = topology;

    if (*topo_cmd) {
      const auto g = load_topology(cfg.topology);
      const auto report = validate_graph(g);
      std::printf("switches %zu links %zu hosts %zu\n", g.switch_count(), g.link_count(), g.hosts().size());
      for (const auto& f : report.findings) std::printf("finding: %s\n", f.c_str());
      std::printf("%s\n", report.ok() ? "valid" : "invalid");
      if (!dump.empty()) open_out(dump) << serialize_graph(g);
      return report.ok() ? 0 : 1;
    }

    const World world = make_world(cfg);

    if (*train_cmd) {
      const auto list = parse_scenario_list(mix);
      const std::size_t n = episodes ? episodes : cfg.dqn.episodes;
      std::fprintf(stderr, "kernels: %s\n", std::string(kernels::isa_name(kernels::active().isa)).c_str());
      const auto result = train(world, cfg, list, n, seed, [&](const EpisodeStats& s) {
        if ((s.episode + 1) % 100 == 0 || s.episode + 1 == n)
          std::fprintf(stderr, "episode %zu/%zu epsilon %.4f reward %.3f\n", s.episode + 1, n, s.epsilon, s.reward);
      });
      dqn::save_weights(weights_out, result.net, seed, config_hash(cfg));
      if (!curves_out.empty()) {
        auto f = open_out(curves_out);
        write_curves_csv(f, result.curves);
      }
      std::printf("trained %zu episodes, %llu gradient steps -> %s\n", n,
                  static_cast<unsigned long long>(result.grad_steps), weights_out.c_str());
      return 0;
    }

    if (*eval_cmd) {
      const auto pols = parse_policies(policies);
      const auto list = parse_scenario_list(scenarios);
      const auto seed_list = parse_seeds(seeds);
      std::optional<dqn::QNetwork> net;
      if (!weights_in.empty()) net = read_weights(weights_in, cfg);
      const auto ev = evaluate(world, cfg, pols, list, seed_list, net ? &*net : nullptr, jobs);
      {
        auto f = open_out(results_out);
        write_results_csv(f, ev.rows);
      }
      if (summary_out.empty()) {
        write_summary(std::cout, ev);
      } else {
        auto f = open_out(summary_out);
        write_summary(f, ev);
      }
      return 0;
    }

    if (*run_cmd) {
      const auto sc = load_scenario(run_id);
      const auto policy = policy_from_string(agent);
      std::optional<dqn::QNetwork> net;
      if (policy == Policy::Agent) {
        if (run_weights.empty()) throw MissingWeights("--weights is required for the trained agent");
        net = read_weights(run_weights, cfg);
      } else if (policy == Policy::Untrained) {
        net = make_network(world, cfg, mix_seed(cfg.dqn.seed, 0xbadc0ffee));
      }
      RunOptions opts;
      opts.duration_s = duration;
      opts.epsilon = cfg.eval_epsilon;
      const auto r = run_episode(world, cfg, sc, policy, net ? &*net : nullptr, run_seed, opts);
      if (!trace_out.empty()) {
        auto f = open_out(trace_out);
        write_trace_jsonl(f, r.trace, cfg.trace_stride, r.t_disruption);
      }
      if (!actuation_out.empty()) {
        auto f = open_out(actuation_out);
        write_actuation_jsonl(f, r.actuation);
      }
      const auto& m = r.metrics;
      std::printf(
          "%s %s seed %llu: latency %.4f ms, loss %.4f%%, throughput %.2f Mb/s, reaction %.4f s, recovery %.4f s "
          "(%s), dy %.4f, actions %zu\n",
          sc.id.c_str(), std::string(to_string(policy)).c_str(), static_cast<unsigned long long>(run_seed),
          m.latency_ms_mean, m.loss_pct, m.throughput_mbps, m.reaction_s, m.recovery_s,
          std::string(to_string(m.recovery)).c_str(), m.dy, r.actuation.size());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
