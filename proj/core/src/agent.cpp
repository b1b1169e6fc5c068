#include "mmwsim/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace mmwsim {

MlpNetwork::MlpNetwork(std::vector<int> layer_sizes, std::uint64_t seed)
    : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw std::invalid_argument("MlpNetwork: need at least two layers");
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    n += static_cast<std::size_t>(sizes_[l] + 1) * sizes_[l + 1];
  }
  params_.resize(n);

  // He-style uniform init scaled by fan-in.
  rng::Stream rng(seed);
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int fan_in = sizes_[l];
    const int fan_out = sizes_[l + 1];
    const double bound = std::sqrt(6.0 / fan_in);
    for (int i = 0; i < fan_out * fan_in; ++i) params_[off++] = rng.uniform(-bound, bound);
    for (int i = 0; i < fan_out; ++i) params_[off++] = 0.0;
  }
}

std::vector<double> MlpNetwork::forward(std::span<const double> input, Workspace& ws) const {
  if (static_cast<int>(input.size()) != sizes_.front())
    throw std::invalid_argument("MlpNetwork::forward: bad input size");

  const std::size_t layers = sizes_.size() - 1;
  ws.pre.assign(layers, {});
  ws.act.assign(layers + 1, {});
  ws.act[0].assign(input.begin(), input.end());

  std::size_t off = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double* w = params_.data() + off;
    const double* b = w + static_cast<std::size_t>(out) * in;
    ws.pre[l].resize(static_cast<std::size_t>(out));
    const double* x = ws.act[l].data();
    for (int o = 0; o < out; ++o) {
      double acc = b[o];
      const double* row = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) acc += row[i] * x[i];
      ws.pre[l][static_cast<std::size_t>(o)] = acc;
    }
    const bool last = (l + 1 == layers);
    ws.act[l + 1].resize(static_cast<std::size_t>(out));
    for (int o = 0; o < out; ++o) {
      const double v = ws.pre[l][static_cast<std::size_t>(o)];
      ws.act[l + 1][static_cast<std::size_t>(o)] = last ? v : std::max(0.0, v);
    }
    off += static_cast<std::size_t>(out) * (in + 1);
  }
  return ws.act.back();
}

std::vector<double> MlpNetwork::forward(std::span<const double> input) const {
  Workspace ws;
  return forward(input, ws);
}

void MlpNetwork::backward(const Workspace& ws, std::span<const double> grad_output,
                          std::vector<double>& grad) const {
  const std::size_t layers = sizes_.size() - 1;
  std::vector<double> delta(grad_output.begin(), grad_output.end());

  // Parameter offsets per layer.
  std::vector<std::size_t> offsets(layers);
  std::size_t off = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    offsets[l] = off;
    off += static_cast<std::size_t>(sizes_[l + 1]) * (sizes_[l] + 1);
  }

  for (std::size_t l = layers; l-- > 0;) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double* x = ws.act[l].data();
    double* gw = grad.data() + offsets[l];
    double* gb = gw + static_cast<std::size_t>(out) * in;
    for (int o = 0; o < out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      double* row = gw + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) row[i] += d * x[i];
      gb[o] += d;
    }
    if (l == 0) break;
    const double* w = params_.data() + offsets[l];
    std::vector<double> prev(static_cast<std::size_t>(in), 0.0);
    for (int o = 0; o < out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      const double* row = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) prev[static_cast<std::size_t>(i)] += d * row[i];
    }
    // ReLU mask of the previous hidden layer.
    for (int i = 0; i < in; ++i) {
      if (ws.pre[l - 1][static_cast<std::size_t>(i)] <= 0.0) prev[static_cast<std::size_t>(i)] = 0.0;
    }
    delta = std::move(prev);
  }
}

void AdamOptimizer::step(std::vector<double>& params, const std::vector<double>& grad) {
  if (m_.size() != params.size()) {
    m_.assign(params.size(), 0.0);
    v_.assign(params.size(), 0.0);
    t_ = 0;
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1 * m_[i] + (1.0 - beta1) * grad[i];
    v_[i] = beta2 * v_[i] + (1.0 - beta2) * grad[i] * grad[i];
    params[i] -= lr * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + eps);
  }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: zero capacity");
  data_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(int batch, rng::Stream& rng) const {
  const std::size_t n = data_.size();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(batch), n);
  // Partial Fisher-Yates over an index vector.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<const Transition*> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n - i - 1)));
    std::swap(idx[i], idx[j]);
    out.push_back(&data_[idx[i]]);
  }
  return out;
}

std::vector<double> encode_state(const State& s, int num_bs, int horizon, double snr_min_db,
                                 double snr_max_db) {
  std::vector<double> f(static_cast<std::size_t>(num_bs) + 3, 0.0);
  f[0] = static_cast<double>(s.location) / horizon;
  f[static_cast<std::size_t>(s.serving_bs)] = 1.0;  // one-hot at indices 1..num_bs
  const double norm = (s.snr_db - snr_min_db) / (snr_max_db - snr_min_db);
  f[static_cast<std::size_t>(num_bs) + 1] = std::clamp(norm, 0.0, 1.0);
  f[static_cast<std::size_t>(num_bs) + 2] = static_cast<double>(s.tracking);
  return f;
}

std::vector<double> QPolicy::q_values(const State& s) const {
  return net.forward(encode_state(s, num_bs, horizon, snr_min_db, snr_max_db));
}

Action QPolicy::greedy(const State& s) const {
  const std::vector<double> q = q_values(s);
  const std::size_t best = static_cast<std::size_t>(
      std::distance(q.begin(), std::max_element(q.begin(), q.end())));
  return static_cast<Action>(best) + action_offset;
}

Action select_action(const QPolicy& policy, const State& s, double eps, rng::Stream& rng) {
  if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("select_action: eps outside [0,1]");
  if (eps > 0.0 && rng.uniform() < eps) {
    return static_cast<Action>(rng.uniform_int(0, policy.num_actions() - 1)) +
           policy.action_offset;
  }
  return policy.greedy(s);
}

double epsilon_at(const TrainConfig& cfg, int episode) {
  if (cfg.episodes <= 1) return cfg.eps_end;
  const double half = std::max(1.0, cfg.episodes / 2.0);
  const double k = std::log(cfg.eps_start / cfg.eps_end) / half;
  return std::max(cfg.eps_end, cfg.eps_start * std::exp(-k * episode));
}

namespace {

double target_value(const Transition& t, const MlpNetwork& target, double discount) {
  if (t.terminal) return t.r;
  const std::vector<double> q2 = target.forward(t.s2);
  return t.r + discount * *std::max_element(q2.begin(), q2.end());
}

}  // namespace

double td_loss(std::span<const Transition* const> batch, const MlpNetwork& online,
               const MlpNetwork& target, double discount) {
  if (batch.empty()) throw std::invalid_argument("td_loss: empty batch");
  double loss = 0.0;
  for (const Transition* t : batch) {
    const double y = target_value(*t, target, discount);
    const double q = online.forward(t->s)[static_cast<std::size_t>(t->a)];
    loss += (q - y) * (q - y);
  }
  return loss / static_cast<double>(batch.size());
}

double td_gradient(std::span<const Transition* const> batch, const MlpNetwork& online,
                   const MlpNetwork& target, double discount, std::vector<double>& grad) {
  if (batch.empty()) throw std::invalid_argument("td_gradient: empty batch");
  grad.assign(static_cast<std::size_t>(online.num_params()), 0.0);
  double loss = 0.0;
  MlpNetwork::Workspace ws;
  std::vector<double> grad_out(static_cast<std::size_t>(online.output_size()));
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const Transition* t : batch) {
    const double y = target_value(*t, target, discount);
    const std::vector<double> q = online.forward(t->s, ws);
    const double err = q[static_cast<std::size_t>(t->a)] - y;
    loss += err * err;
    std::fill(grad_out.begin(), grad_out.end(), 0.0);
    grad_out[static_cast<std::size_t>(t->a)] = 2.0 * err * inv_n;
    online.backward(ws, grad_out, grad);
  }
  return loss * inv_n;
}

double td_update(std::span<const Transition* const> batch, MlpNetwork& online,
                 const MlpNetwork& target, double discount, AdamOptimizer& opt) {
  std::vector<double> grad;
  const double loss = td_gradient(batch, online, target, discount, grad);
  if (!std::isfinite(loss)) throw TrainingError("td_update: non-finite loss");
  opt.step(online.params(), grad);
  return loss;
}

TrainResult train(MdpEnv& env, const TrainConfig& cfg) {
  if (cfg.discount < 0.0 || cfg.discount > 1.0)
    throw std::invalid_argument("train: discount outside [0,1]");
  const int num_bs = env.num_bs();
  const int num_actions = cfg.handover_only ? num_bs : num_bs + 1;

  std::vector<int> sizes;
  sizes.push_back(num_bs + 3);
  for (int h : cfg.hidden_layers) sizes.push_back(h);
  sizes.push_back(num_actions);

  TrainResult result;
  QPolicy& policy = result.policy;
  policy.net = MlpNetwork(sizes, rng::substream_seed(cfg.seed, "init"));
  policy.num_bs = num_bs;
  policy.horizon = env.horizon();
  policy.action_offset = cfg.handover_only ? 1 : 0;
  policy.snr_min_db = cfg.snr_min_db;
  policy.snr_max_db = cfg.snr_max_db;

  MlpNetwork target = policy.net;
  AdamOptimizer opt;
  opt.lr = cfg.lr;
  ReplayBuffer buffer(static_cast<std::size_t>(cfg.buffer_capacity));
  rng::Stream explore(rng::substream_seed(cfg.seed, "explore"));
  rng::Stream sampler(rng::substream_seed(cfg.seed, "sample"));

  long env_steps = 0;
  long updates = 0;
  double running_return = 0.0;

  auto encode = [&](const State& s) {
    return encode_state(s, num_bs, env.horizon(), cfg.snr_min_db, cfg.snr_max_db);
  };

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const double eps = epsilon_at(cfg, ep);
    State s = env.reset(static_cast<std::uint64_t>(ep) + 1);
    double ep_return = 0.0;
    double ep_loss = 0.0;
    int loss_count = 0;

    while (!env.finished()) {
      const Action a = select_action(policy, s, eps, explore);
      const StepOutcome out = env.step(a);
      const double r = (cfg.reward_signal == RewardSignal::Rate) ? out.rate : out.reward;
      buffer.push({encode(s), encode(out.next), a - policy.action_offset, r, out.terminal});
      ep_return += r;

      if (buffer.size() >= static_cast<std::size_t>(
                               std::max(cfg.batch_size, cfg.warmup_transitions)) &&
          env_steps % cfg.train_every == 0) {
        const auto batch = buffer.sample(cfg.batch_size, sampler);
        ep_loss += td_update(batch, policy.net, target, cfg.discount, opt);
        ++loss_count;
        if (++updates % cfg.target_sync_period == 0) target = policy.net;
      }
      ++env_steps;
      s = out.next;
    }

    result.episode_return.push_back(ep_return);
    result.episode_loss.push_back(loss_count > 0 ? ep_loss / loss_count : 0.0);
    result.episode_eps.push_back(eps);

    running_return = 0.99 * running_return + 0.01 * ep_return;
    if (!std::isfinite(running_return)) throw TrainingError("train: diverged (NaN return)");
  }
  return result;
}

int TabularQ::bucket(double snr) const {
  const double clamped = std::clamp(snr, snr_min_db, snr_max_db);
  return static_cast<int>(std::floor((clamped - snr_min_db) / snr_bucket_db));
}

TabularQ::Key TabularQ::key(const State& s) const {
  return {s.location, s.serving_bs, bucket(s.snr_db), s.tracking};
}

const std::vector<double>& TabularQ::values(const State& s) const {
  auto it = table.find(key(s));
  if (it == table.end()) {
    static thread_local std::vector<double> fallback;
    fallback.assign(static_cast<std::size_t>(num_actions), 0.0);
    return fallback;
  }
  return it->second;
}

Action TabularQ::greedy(const State& s) const {
  const std::vector<double>& q = values(s);
  const std::size_t best = static_cast<std::size_t>(
      std::distance(q.begin(), std::max_element(q.begin(), q.end())));
  return static_cast<Action>(best) + action_offset;
}

TabularQ tabular_q_learning(MdpEnv& env, const TabularConfig& cfg) {
  TabularQ q;
  q.num_actions = cfg.handover_only ? env.num_bs() : env.num_bs() + 1;
  q.action_offset = cfg.handover_only ? 1 : 0;
  q.snr_min_db = cfg.snr_min_db;
  q.snr_max_db = cfg.snr_max_db;
  q.snr_bucket_db = cfg.snr_bucket_db;

  rng::Stream explore(rng::substream_seed(cfg.seed, "tabular"));
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    State s = env.reset(static_cast<std::uint64_t>(ep) + 1);
    while (!env.finished()) {
      auto& qs = q.table
                     .try_emplace(q.key(s), std::vector<double>(
                                                static_cast<std::size_t>(q.num_actions), 0.0))
                     .first->second;
      int ai;
      if (explore.uniform() < cfg.eps) {
        ai = static_cast<int>(explore.uniform_int(0, q.num_actions - 1));
      } else {
        ai = static_cast<int>(
            std::distance(qs.begin(), std::max_element(qs.begin(), qs.end())));
      }
      const StepOutcome out = env.step(ai + q.action_offset);
      const double r = out.reward;
      double y = r;
      if (!out.terminal) {
        const std::vector<double>& q2 = q.values(out.next);
        y = r + cfg.discount * *std::max_element(q2.begin(), q2.end());
      }
      auto& qsa = q.table.at(q.key(s))[static_cast<std::size_t>(ai)];
      qsa += cfg.alpha * (y - qsa);
      s = out.next;
    }
  }
  return q;
}

void write_learning_curve_csv(const TrainResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write learning curve: " + path);
  out << "episode,return,epsilon,loss\n";
  char line[256];
  for (std::size_t i = 0; i < result.episode_return.size(); ++i) {
    std::snprintf(line, sizeof(line), "%zu,%.9g,%.9g,%.9g\n", i + 1, result.episode_return[i],
                  result.episode_eps[i], result.episode_loss[i]);
    out << line;
  }
}

}  // namespace mmwsim
