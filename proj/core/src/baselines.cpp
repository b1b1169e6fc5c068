#include "mmwsim/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace mmwsim {

int nearest_other_bs(const Scenario& scenario, int serving_bs, int slot) {
  const auto& wp = scenario.trajectory.waypoints.at(static_cast<std::size_t>(slot - 1));
  int best = -1;
  double best_d2 = 0.0;
  for (const BsSite& bs : scenario.base_stations) {
    if (bs.id == serving_bs) continue;
    const double dx = bs.position.x - wp[0];
    const double dy = bs.position.y - wp[1];
    const double d2 = dx * dx + dy * dy;
    if (best < 0 || d2 < best_d2) {
      best = bs.id;
      best_d2 = d2;
    }
  }
  return best;
}

std::vector<SlotRecord> run_multiconnectivity(SimEnv& env, std::uint64_t realization) {
  if (env.num_bs() < 2)
    throw std::invalid_argument("run_multiconnectivity: needs at least two BSs");
  const Scenario& scenario = env.scenario();
  // The env ignores the action whenever the gate SNR is already met, so the
  // policy can unconditionally name the backup target.
  return run_episode(
      env,
      [&](const State& s) { return nearest_other_bs(scenario, s.serving_bs, s.location); },
      realization);
}

TrainResult train_learned_handover(MdpEnv& env, TrainConfig cfg) {
  if (env.num_bs() < 1) throw std::invalid_argument("train_learned_handover: no BSs");
  cfg.handover_only = true;
  cfg.reward_signal = RewardSignal::Rate;
  return train(env, cfg);
}

}  // namespace mmwsim
