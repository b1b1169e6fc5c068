#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mmwsim/beamforming.hpp"
#include "mmwsim/propagation.hpp"
#include "mmwsim/scene.hpp"

namespace mmwsim {

struct State {
  int location = 1;      // 1..M along the trajectory
  int serving_bs = 1;    // 1..|B|
  double snr_db = 0.0;   // with the serving BS, measured at slot entry
  int tracking = 0;      // beam tracking indicator I
};

// 0 = beam tracking, j >= 1 = handover to BS j.
using Action = int;

struct StepOutcome {
  State next;
  double reward = 0.0;
  double rate = 0.0;        // bit/s/Hz
  double throughput = 0.0;  // bit/Hz
  double tau_b_s = 0.0;
  int slot = 0;             // slot this outcome describes
  Action action = 0;
  int cnt = 0;              // beams measured while tracking
  double snr_db = 0.0;      // SNR the slot's data phase ran at
  bool gate_passed = false; // entry SNR already met the threshold
  bool handover_executed = false;
  bool reactive_fallback = false;
  bool terminal = false;
};

struct EnvConfig {
  double slot_s = 10e-3;       // tau_c
  double beam_test_s = 10e-6;  // beta
  double snr_thr_db = 2.0;
  double throughput_thr = 1.0;  // Gamma_thr, bit/Hz
  double lambda = 100.0;
  NeighborhoodSpec neighborhood;
  CodebookGrid codebook_grid;
  LinkBudget budget;
  ArrayGeometry array;
};

// Gamma = (1 - tau_b / tau_c) * R. Throws if tau_b is negative or exceeds
// the slot.
double throughput(double rate, double tau_b_s, double slot_s);

// r = Gamma - lambda * 1{Gamma <= Gamma_thr}.
double reward(double gamma, double gamma_thr, double lambda);

// SNR (dB, floor sentinel allowed) -> rate.
double rate_from_snr_db(double snr);

class MdpEnv {
 public:
  virtual ~MdpEnv() = default;

  virtual State reset(std::uint64_t realization) = 0;
  virtual StepOutcome step(Action action) = 0;
  virtual int num_bs() const = 0;
  virtual int horizon() const = 0;
  virtual bool finished() const = 0;
  virtual std::array<double, 2> location_xy(int slot) const { return {0.0, 0.0}; }
};

// Simulation environment over a generated scenario. One instance runs one
// episode at a time; independent instances may run in parallel.
class SimEnv final : public MdpEnv {
 public:
  SimEnv(Scenario scenario, EnvConfig config, std::uint64_t master_seed);

  State reset(std::uint64_t realization) override;
  StepOutcome step(Action action) override;

  int num_bs() const override { return static_cast<int>(scenario_.base_stations.size()); }
  int horizon() const override { return scenario_.trajectory.slots(); }
  bool finished() const override { return finished_; }
  std::array<double, 2> location_xy(int slot) const override {
    return scenario_.trajectory.waypoints.at(static_cast<std::size_t>(slot - 1));
  }

  const Scenario& scenario() const { return scenario_; }
  const EnvConfig& config() const { return config_; }
  const State& state() const { return state_; }
  const ObstacleSet& obstacles() const { return obstacles_; }

  // SNR at (slot, bs) with a unit-norm beam steered to dir; exposed for
  // baselines and tests.
  double measure_snr(int slot, int bs, const Direction& dir);

 private:
  Vec3 ue_position(int slot) const;
  const ChannelVector& channel(int slot, int bs);
  TrainingOutcome full_training(int slot, int bs);

  Scenario scenario_;
  EnvConfig config_;
  PropagationParams prop_;
  Codebook codebook_;
  std::uint64_t master_seed_ = 0;

  // Static path geometry per (slot, bs), fixed across realizations.
  std::vector<std::vector<TracedPath>> static_paths_;

  // Per-episode state.
  std::uint64_t realization_ = 0;
  std::uint64_t fading_seed_ = 0;
  ObstacleSet obstacles_;
  std::vector<std::optional<ChannelVector>> channel_cache_;
  State state_;
  Direction beam_;
  bool finished_ = true;
};

struct SlotRecord {
  StepOutcome outcome;
  double x = 0.0, y = 0.0;
};

using Policy = std::function<Action(const State&)>;

// Runs one full episode under the policy; returns M slot records.
std::vector<SlotRecord> run_episode(MdpEnv& env, const Policy& policy, std::uint64_t realization);

// Trace CSV: slot,x,y,serving_bs,action,snr_db,cnt,tau_b_us,rate,throughput,
// reward,handover,fallback.
void write_trace_csv(const std::vector<SlotRecord>& trace, const std::string& path);

}  // namespace mmwsim
