#pragma once

// Deterministic two-BS toy environment with scripted SNRs. Small enough for
// exact value iteration, which makes it the reference point for both the
// tabular learner and the DQN.

#include <mmwsim/env.hpp>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace toy {

constexpr int kSlots = 10;
constexpr int kNumBs = 2;

// Scripted entry SNR per (slot, serving BS), all below the 2 dB gate so every
// action executes. Values stay inside the agent's encoding range.
inline double entry_snr_db(int slot, int serving) {
  static const double table[kSlots][kNumBs] = {
      {-4.0, -6.0}, {0.5, -8.0},  {-2.0, 1.0},  {-7.0, -1.0}, {1.5, -3.0},
      {-5.0, 0.0},  {-1.0, -9.0}, {0.0, -2.5},  {-6.0, 1.0},  {-3.0, -0.5},
  };
  return table[slot - 1][serving - 1];
}

// Reward for (slot, serving, action); action 0 tracks, 1..2 hand over.
// Hand-picked so the optimal action is unique with a comfortable margin at
// every (slot, serving) pair (asserted by the tests via value iteration).
inline double reward(int slot, int serving, int action) {
  static const double track[kSlots][kNumBs] = {
      {1.0, 0.3}, {1.1, 1.8}, {0.1, 0.8}, {1.1, 0.7}, {1.0, 2.1},
      {1.3, 1.3}, {0.3, 0.7}, {1.2, 2.1}, {1.0, 2.5}, {1.2, 1.5},
  };
  static const double handover[kSlots][kNumBs] = {
      {2.4, 0.6}, {0.9, 1.3}, {2.1, 1.1}, {0.8, 1.9}, {2.4, 1.8},
      {0.8, 2.3}, {2.4, 0.4}, {1.0, 1.6}, {1.8, 0.4}, {2.5, 1.6},
  };
  if (action == 0) return track[slot - 1][serving - 1];
  return handover[slot - 1][action - 1] - (action == serving ? 0.45 : 0.0);
}

class ToyEnv final : public mmwsim::MdpEnv {
 public:
  mmwsim::State reset(std::uint64_t) override {
    state_ = mmwsim::State{1, 1, entry_snr_db(1, 1), 0};
    finished_ = false;
    return state_;
  }

  mmwsim::StepOutcome step(mmwsim::Action action) override {
    if (finished_) throw std::logic_error("ToyEnv::step: episode finished");
    if (action < 0 || action > kNumBs) throw std::invalid_argument("ToyEnv::step: invalid action");
    const int slot = state_.location;
    mmwsim::StepOutcome out;
    out.slot = slot;
    out.action = action;
    out.reward = reward(slot, state_.serving_bs, action);
    out.rate = out.reward;  // rate-signal training sees the same numbers
    out.throughput = out.reward;
    const int serving = action == 0 ? state_.serving_bs : action;
    const int indicator = action == 0 ? 1 : 0;
    if (slot == kSlots) {
      finished_ = true;
      out.terminal = true;
      state_ = mmwsim::State{slot, serving, entry_snr_db(slot, serving), indicator};
    } else {
      state_ = mmwsim::State{slot + 1, serving, entry_snr_db(slot + 1, serving), indicator};
    }
    out.next = state_;
    return out;
  }

  int num_bs() const override { return kNumBs; }
  int horizon() const override { return kSlots; }
  bool finished() const override { return finished_; }

 private:
  mmwsim::State state_{1, 1, 0.0, 0};
  bool finished_ = true;
};

// Exact finite-horizon value iteration over (slot, serving). Returns optimal
// action-values q[slot-1][serving-1][action].
struct ValueIteration {
  double discount = 0.99;
  std::vector<std::array<std::array<double, kNumBs + 1>, kNumBs>> q;

  explicit ValueIteration(double eta = 0.99) : discount(eta) {
    q.assign(kSlots, {});
    for (int slot = kSlots; slot >= 1; --slot) {
      for (int serving = 1; serving <= kNumBs; ++serving) {
        for (int a = 0; a <= kNumBs; ++a) {
          double v = reward(slot, serving, a);
          if (slot < kSlots) {
            const int next = a == 0 ? serving : a;
            v += discount * value(slot + 1, next);
          }
          q[slot - 1][serving - 1][a] = v;
        }
      }
    }
  }

  double value(int slot, int serving) const {
    const auto& row = q[slot - 1][serving - 1];
    double best = row[0];
    for (int a = 1; a <= kNumBs; ++a) best = std::max(best, row[a]);
    return best;
  }

  int best_action(int slot, int serving, int action_offset = 0) const {
    const auto& row = q[slot - 1][serving - 1];
    int best = action_offset;
    for (int a = action_offset + 1; a <= kNumBs; ++a)
      if (row[a] > row[best]) best = a;
    return best;
  }

  // Smallest gap between the best and second-best action over all states;
  // a healthy margin is what makes the learner comparisons meaningful.
  double min_margin(int action_offset = 0) const {
    double margin = 1e300;
    for (int slot = 1; slot <= kSlots; ++slot)
      for (int serving = 1; serving <= kNumBs; ++serving) {
        const auto& row = q[slot - 1][serving - 1];
        const int best = best_action(slot, serving, action_offset);
        for (int a = action_offset; a <= kNumBs; ++a)
          if (a != best) margin = std::min(margin, row[best] - row[a]);
      }
    return margin;
  }
};

}  // namespace toy
