#pragma once

#include "mmwsim/agent.hpp"
#include "mmwsim/env.hpp"

namespace mmwsim {

// Baseline 1: multi-connectivity. The UE keeps the 2-D nearest other BS as a
// standby link; whenever the serving SNR drops below the threshold it switches
// to that backup (full initial beam training), never tracking. Throws
// std::invalid_argument on single-BS scenarios.
std::vector<SlotRecord> run_multiconnectivity(SimEnv& env, std::uint64_t realization);

// The per-slot backup choice used by baseline 1: the BS other than the
// serving one closest (2-D) to the UE's position at that slot.
int nearest_other_bs(const Scenario& scenario, int serving_bs, int slot);

// Baseline 2: learned handover. Same DQN machinery with the tracking action
// removed and the rate (not throughput) as the training signal.
TrainResult train_learned_handover(MdpEnv& env, TrainConfig cfg);

}  // namespace mmwsim
