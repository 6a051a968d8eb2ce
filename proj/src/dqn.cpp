#include "autoheal/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "autoheal/kernels.hpp"

namespace autoheal::dqn {

void DQNConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0,1)");
  if (!(alpha >= 0.0 && alpha < 1.0) || !(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument("reward weights must lie in [0,1)");
  if (!(epsilon_floor >= 0.0 && epsilon_floor <= epsilon_start && epsilon_start <= 1.0))
    throw std::invalid_argument("epsilon schedule out of range");
  if (batch_size == 0 || replay_capacity < batch_size) throw std::invalid_argument("replay capacity below batch size");
  if (hidden_units == 0) throw std::invalid_argument("hidden layer width must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
}

double epsilon_at(std::size_t episode, const DQNConfig& cfg) {
  return std::max(cfg.epsilon_floor, cfg.epsilon_start * std::pow(cfg.epsilon_decay, static_cast<double>(episode)));
}

QNetwork::QNetwork(std::vector<std::size_t> layer_sizes, std::uint64_t seed) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("network needs at least input and output layers");
  if (std::any_of(sizes_.begin(), sizes_.end(), [](std::size_t s) { return s == 0; }))
    throw std::invalid_argument("layer sizes must be >= 1");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
  params_.assign(total, 0.0);
  // Glorot-uniform weights, zero biases.
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(sizes_[l] + sizes_[l + 1]));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& w : weights(l)) w = dist(rng);
  }
}

std::span<double> QNetwork::weights(std::size_t layer) {
  return std::span<double>(params_).subspan(offsets_[layer], sizes_[layer + 1] * sizes_[layer]);
}
std::span<const double> QNetwork::weights(std::size_t layer) const {
  return std::span<const double>(params_).subspan(offsets_[layer], sizes_[layer + 1] * sizes_[layer]);
}
std::span<double> QNetwork::bias(std::size_t layer) {
  return std::span<double>(params_).subspan(offsets_[layer] + sizes_[layer + 1] * sizes_[layer], sizes_[layer + 1]);
}
std::span<const double> QNetwork::bias(std::size_t layer) const {
  return std::span<const double>(params_).subspan(offsets_[layer] + sizes_[layer + 1] * sizes_[layer],
                                                  sizes_[layer + 1]);
}

void QNetwork::forward_trace(std::span<const double> x, Trace& trace) const {
  if (x.size() != input_size())
    throw std::invalid_argument("input has " + std::to_string(x.size()) + " entries, network expects " +
                                std::to_string(input_size()));
  const auto& k = kernels::active();
  trace.activations.resize(sizes_.size());
  trace.pre.resize(layer_count());
  trace.activations[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layer_count(); ++l) {
    auto& z = trace.pre[l];
    z.resize(sizes_[l + 1]);
    k.gemv(weights(l), trace.activations[l], bias(l), z, sizes_[l + 1], sizes_[l]);
    auto& a = trace.activations[l + 1];
    a = z;
    if (l + 1 < layer_count()) {
      for (auto& v : a) v = v > 0.0 ? v : 0.0;
    }
  }
}

std::vector<double> QNetwork::forward(std::span<const double> x) const {
  Trace trace;
  forward_trace(x, trace);
  return std::move(trace.activations.back());
}

void sync_target(const QNetwork& net, QNetwork& target) { target = net; }

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("replay capacity must be >= 1");
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(std::move(t));
}

std::optional<std::vector<const Transition*>> ReplayBuffer::sample(std::size_t batch, std::mt19937_64& rng) const {
  if (batch == 0 || items_.size() < batch) return std::nullopt;
  std::vector<std::size_t> idx(items_.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<const Transition*> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
    out.push_back(&items_[idx[i]]);
  }
  return out;
}

double reward(double mean_norm_latency, double mean_norm_utilization, const DQNConfig& cfg) {
  return cfg.capacity_term - (cfg.alpha * mean_norm_latency + cfg.beta * mean_norm_utilization);
}

std::vector<double> td_targets(std::span<const Transition* const> batch, const QNetwork& target, double gamma) {
  std::vector<double> y;
  y.reserve(batch.size());
  for (const auto* t : batch) {
    if (t->done) {
      y.push_back(t->r);
      continue;
    }
    const auto q = target.forward(t->s_next);
    y.push_back(t->r + gamma * *std::max_element(q.begin(), q.end()));
  }
  return y;
}

LossGradient td_loss_gradient(const QNetwork& net, std::span<const Transition* const> batch,
                              std::span<const double> targets) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const auto& k = kernels::active();
  const auto& sizes = net.layer_sizes();
  const std::size_t layers = net.layer_count();
  const double n = static_cast<double>(batch.size());

  LossGradient out;
  out.grad.assign(net.params().size(), 0.0);
  // Gradient buffer views mirror the parameter layout.
  std::vector<std::size_t> offsets;
  {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layers; ++l) {
      offsets.push_back(off);
      off += sizes[l + 1] * sizes[l] + sizes[l + 1];
    }
  }

  QNetwork::Trace trace;
  std::vector<double> delta, back;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto* t = batch[i];
    if (t->a >= net.output_size()) throw std::invalid_argument("transition action out of range");
    net.forward_trace(t->s, trace);
    const double err = trace.activations.back()[t->a] - targets[i];
    out.loss += err * err / n;

    delta.assign(sizes.back(), 0.0);
    delta[t->a] = 2.0 * err / n;
    for (std::size_t l = layers; l-- > 0;) {
      const std::size_t rows = sizes[l + 1], cols = sizes[l];
      std::span<double> gw(out.grad.data() + offsets[l], rows * cols);
      std::span<double> gb(out.grad.data() + offsets[l] + rows * cols, rows);
      k.ger(delta, trace.activations[l], gw, rows, cols);
      for (std::size_t r = 0; r < rows; ++r) gb[r] += delta[r];
      if (l == 0) break;
      back.resize(cols);
      k.gemv_t(net.weights(l), delta, back, rows, cols);
      for (std::size_t c = 0; c < cols; ++c) back[c] = trace.pre[l - 1][c] > 0.0 ? back[c] : 0.0;
      delta.swap(back);
    }
  }
  return out;
}

Adam::Adam(std::size_t params, const DQNConfig& cfg)
    : lr_(cfg.learning_rate),
      beta1_(cfg.adam_beta1),
      beta2_(cfg.adam_beta2),
      eps_(cfg.adam_epsilon),
      m_(params, 0.0),
      v_(params, 0.0) {}

void Adam::apply(std::span<double> params, std::span<const double> grad) {
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double lr_t = lr_ * std::sqrt(1.0 - std::pow(beta2_, t)) / (1.0 - std::pow(beta1_, t));
  kernels::active().adam(params, grad, m_, v_, lr_t, beta1_, beta2_, eps_);
}

double train_step(QNetwork& net, const QNetwork& target, std::span<const Transition* const> batch, Adam& opt,
                  double gamma) {
  const auto y = td_targets(batch, target, gamma);
  auto lg = td_loss_gradient(net, batch, y);
  if (!std::isfinite(lg.loss)) throw TrainingDiverged("non-finite TD loss");
  opt.apply(net.params(), lg.grad);
  return lg.loss;
}

std::size_t action_count(std::size_t k_paths) { return k_paths + 4; }

Action decode_action(std::size_t index, std::size_t k_paths) {
  if (index < k_paths) return {ActionKind::Path, index};
  switch (index - k_paths) {
    case 0: return {ActionKind::ThrottleBestEffort, 0};
    case 1: return {ActionKind::ThrottleDelayTolerant, 0};
    case 2: return {ActionKind::Cooling, 0};
    case 3: return {ActionKind::NoOp, 0};
  }
  throw std::out_of_range("action index out of range");
}

std::size_t encode_action(const Action& action, std::size_t k_paths) {
  switch (action.kind) {
    case ActionKind::Path:
      if (action.slot >= k_paths) throw std::out_of_range("path slot out of range");
      return action.slot;
    case ActionKind::ThrottleBestEffort: return k_paths;
    case ActionKind::ThrottleDelayTolerant: return k_paths + 1;
    case ActionKind::Cooling: return k_paths + 2;
    case ActionKind::NoOp: return k_paths + 3;
  }
  return k_paths + 3;
}

std::string describe(const Action& action) {
  switch (action.kind) {
    case ActionKind::Path: return "path:" + std::to_string(action.slot);
    case ActionKind::ThrottleBestEffort: return "throttle:best-effort";
    case ActionKind::ThrottleDelayTolerant: return "throttle:delay-tolerant";
    case ActionKind::Cooling: return "cooling";
    case ActionKind::NoOp: return "no-op";
  }
  return "no-op";
}

std::size_t ActionSpace::eligible_count() const {
  return static_cast<std::size_t>(std::count(eligible.begin(), eligible.end(), char{1}));
}

ActionSpace build_action_space(const ViolationReport& report, std::span<const Path> candidates, std::size_t k_paths) {
  ActionSpace space;
  space.k_paths = k_paths;
  space.eligible.assign(action_count(k_paths), 1);
  space.slot_paths.assign(k_paths, Path{});
  space.target_pair = report.worst_pair();

  std::vector<char> avoid;
  if (report.thermal_alarm()) {
    SwitchId top = 0;
    for (auto s : report.hot) top = std::max(top, s);
    for (auto s : report.cold) top = std::max(top, s);
    avoid.assign(static_cast<std::size_t>(top) + 1, 0);
    for (auto s : report.hot) avoid[s] = 1;
    for (auto s : report.cold) avoid[s] = 1;
  }
  auto usable = [&](const Path& p) {
    // Endpoints are shared by every candidate, so only transit switches count.
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
      if (p[i] < avoid.size() && avoid[p[i]]) return false;
    }
    return true;
  };
  for (std::size_t slot = 0; slot < k_paths; ++slot) {
    const bool ok = space.target_pair && slot < candidates.size() && usable(candidates[slot]);
    space.eligible[slot] = ok ? 1 : 0;
    if (ok) space.slot_paths[slot] = candidates[slot];
  }
  return space;
}

std::size_t greedy(std::span<const double> q, std::span<const char> eligible) {
  std::size_t best = q.size();
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!eligible[i]) continue;
    if (best == q.size() || q[i] > q[best]) best = i;
  }
  return best;
}

Selection select_action(const QNetwork& net, std::span<const double> state, double epsilon,
                        const ActionSpace& space, std::mt19937_64& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0,1]");
  Selection sel;
  const std::size_t noop = encode_action({ActionKind::NoOp, 0}, space.k_paths);
  const std::size_t count = space.eligible_count();
  const double xi = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (count == 0) {
    sel.index = noop;
    sel.fallback = true;
    return sel;
  }
  if (xi <= epsilon) {
    std::size_t nth = std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
    for (std::size_t i = 0; i < space.size(); ++i) {
      if (space.eligible[i] && nth-- == 0) {
        sel.index = i;
        break;
      }
    }
    sel.explored = true;
    return sel;
  }
  const auto q = net.forward(state);
  sel.index = greedy(q, space.eligible);
  return sel;
}

namespace {

constexpr char kMagic[8] = {'A', 'H', 'Q', 'N', 'E', 'T', '0', '1'};

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated weights file");
  return v;
}

}  // namespace

void save_weights(const std::string& path, const QNetwork& net, std::uint64_t seed, std::uint64_t config_hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write weights file '" + path + "'");
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(net.input_size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(net.output_size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(net.layer_sizes().size()));
  for (auto s : net.layer_sizes()) put<std::uint32_t>(out, static_cast<std::uint32_t>(s));
  put<std::uint64_t>(out, seed);
  put<std::uint64_t>(out, config_hash);
  put<std::uint64_t>(out, net.params().size());
  out.write(reinterpret_cast<const char*>(net.params().data()),
            static_cast<std::streamsize>(net.params().size() * sizeof(double)));
  if (!out) throw std::runtime_error("failed writing weights file '" + path + "'");
}

QNetwork load_weights(const std::string& path, WeightsHeader* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open weights file '" + path + "'");
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw std::runtime_error("not a weights file");
  WeightsHeader h;
  h.version = get<std::uint32_t>(in);
  if (h.version != 1) throw std::runtime_error("unsupported weights version " + std::to_string(h.version));
  const auto eta = get<std::uint32_t>(in);
  const auto actions = get<std::uint32_t>(in);
  const auto n_sizes = get<std::uint32_t>(in);
  if (n_sizes < 2 || n_sizes > 64) throw std::runtime_error("corrupt layer table");
  for (std::uint32_t i = 0; i < n_sizes; ++i) h.layer_sizes.push_back(get<std::uint32_t>(in));
  if (h.layer_sizes.front() != eta || h.layer_sizes.back() != actions)
    throw std::runtime_error("weights header is inconsistent");
  h.seed = get<std::uint64_t>(in);
  h.config_hash = get<std::uint64_t>(in);
  const auto count = get<std::uint64_t>(in);
  QNetwork net(h.layer_sizes, 0);
  if (count != net.params().size()) throw std::runtime_error("parameter count mismatch");
  in.read(reinterpret_cast<char*>(net.params().data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw std::runtime_error("truncated weights file");
  if (header) *header = h;
  return net;
}

}  // namespace autoheal::dqn
