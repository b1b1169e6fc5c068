#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "mmwsim/env.hpp"
#include "mmwsim/rng.hpp"

namespace mmwsim {

// Fully connected network, ReLU hidden layers, linear output. Parameters are
// stored flat (per layer: weights row-major [out][in], then biases) so the
// optimizer and the checkpoint format see a single vector.
class MlpNetwork {
 public:
  MlpNetwork() = default;
  MlpNetwork(std::vector<int> layer_sizes, std::uint64_t seed);

  std::vector<double> forward(std::span<const double> input) const;

  struct Workspace {
    std::vector<std::vector<double>> pre;  // pre-activation per layer
    std::vector<std::vector<double>> act;  // post-activation, act[0] = input
  };
  std::vector<double> forward(std::span<const double> input, Workspace& ws) const;

  // Accumulates dLoss/dParams into grad given dLoss/dOutput; grad must have
  // num_params() entries.
  void backward(const Workspace& ws, std::span<const double> grad_output,
                std::vector<double>& grad) const;

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  int num_params() const { return static_cast<int>(params_.size()); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

 private:
  std::vector<int> sizes_;
  std::vector<double> params_;
};

struct AdamOptimizer {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void step(std::vector<double>& params, const std::vector<double>& grad);

 private:
  std::vector<double> m_, v_;
  long t_ = 0;
};

struct Transition {
  std::vector<double> s, s2;
  int a = 0;  // network output index
  double r = 0.0;
  bool terminal = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }

  // Uniform sample without replacement; batch is clamped to size().
  std::vector<const Transition*> sample(int batch, rng::Stream& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
};

// [location/M, one-hot serving BS, normalized clamped SNR, tracking flag];
// dimension num_bs + 3.
std::vector<double> encode_state(const State& s, int num_bs, int horizon,
                                 double snr_min_db = -20.0, double snr_max_db = 60.0);

enum class RewardSignal { EnvReward, Rate };

struct TrainConfig {
  double discount = 0.99;
  int episodes = 10000;
  double eps_start = 1.0;
  double eps_end = 0.05;
  double lr = 1e-3;
  int batch_size = 64;
  int buffer_capacity = 50000;
  int target_sync_period = 500;  // gradient steps between target refreshes
  int train_every = 1;           // env steps between gradient steps
  int warmup_transitions = 500;
  std::vector<int> hidden_layers{64, 64};
  std::uint64_t seed = 1;
  RewardSignal reward_signal = RewardSignal::EnvReward;
  bool handover_only = false;  // restrict actions to {1..|B|} (no tracking)
  double snr_min_db = -20.0;
  double snr_max_db = 60.0;
};

struct QPolicy {
  MlpNetwork net;
  int num_bs = 0;
  int horizon = 0;
  int action_offset = 0;  // env action = output index + offset
  double snr_min_db = -20.0;
  double snr_max_db = 60.0;

  std::vector<double> q_values(const State& s) const;
  // Lowest-index argmax.
  Action greedy(const State& s) const;
  int num_actions() const { return net.output_size(); }
};

Action select_action(const QPolicy& policy, const State& s, double eps, rng::Stream& rng);

// Exploration schedule: exponential decay from eps_start to eps_end over the
// first half of the episodes, flat afterwards.
double epsilon_at(const TrainConfig& cfg, int episode);

// TD target y = r + discount * max_a' Q_target(s') (y = r at terminal); loss
// is the mean squared error over the batch on the taken actions.
double td_loss(std::span<const Transition* const> batch, const MlpNetwork& online,
               const MlpNetwork& target, double discount);
double td_gradient(std::span<const Transition* const> batch, const MlpNetwork& online,
                   const MlpNetwork& target, double discount, std::vector<double>& grad);
double td_update(std::span<const Transition* const> batch, MlpNetwork& online,
                 const MlpNetwork& target, double discount, AdamOptimizer& opt);

struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainResult {
  QPolicy policy;
  std::vector<double> episode_return;
  std::vector<double> episode_loss;
  std::vector<double> episode_eps;
};

// Deep Q-learning over the environment; deterministic given cfg.seed.
// Episode k uses realization k+1. Throws TrainingError on divergence.
TrainResult train(MdpEnv& env, const TrainConfig& cfg);

// ---- Tabular verification mode -------------------------------------------

struct TabularConfig {
  double discount = 0.99;
  double alpha = 1.0;
  double eps = 1.0;
  int episodes = 2000;
  std::uint64_t seed = 1;
  double snr_min_db = -20.0;
  double snr_max_db = 60.0;
  double snr_bucket_db = 5.0;
  bool handover_only = false;
};

struct TabularQ {
  using Key = std::tuple<int, int, int, int>;  // (location, serving, snr bucket, I)
  std::map<Key, std::vector<double>> table;
  int num_actions = 0;
  int action_offset = 0;
  double snr_min_db = -20.0, snr_max_db = 60.0, snr_bucket_db = 5.0;

  int bucket(double snr) const;
  Key key(const State& s) const;
  Action greedy(const State& s) const;
  const std::vector<double>& values(const State& s) const;
};

TabularQ tabular_q_learning(MdpEnv& env, const TabularConfig& cfg);

void write_learning_curve_csv(const TrainResult& result, const std::string& path);

}  // namespace mmwsim
