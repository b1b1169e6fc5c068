#include "mmwsim/env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace mmwsim {

double throughput(double rate, double tau_b_s, double slot_s) {
  if (tau_b_s < 0.0 || tau_b_s > slot_s)
    throw std::invalid_argument("throughput: training time outside [0, slot]");
  return (1.0 - tau_b_s / slot_s) * rate;
}

double reward(double gamma, double gamma_thr, double lambda) {
  return gamma - lambda * (gamma <= gamma_thr ? 1.0 : 0.0);
}

double rate_from_snr_db(double snr) {
  return std::log2(1.0 + db_to_linear(snr));
}

SimEnv::SimEnv(Scenario scenario, EnvConfig config, std::uint64_t master_seed)
    : scenario_(std::move(scenario)), config_(std::move(config)), master_seed_(master_seed) {
  if (scenario_.base_stations.empty()) throw std::invalid_argument("SimEnv: no base stations");
  if (scenario_.trajectory.slots() < 1) throw std::invalid_argument("SimEnv: empty trajectory");
  if (config_.beam_test_s <= 0.0 || config_.slot_s <= config_.beam_test_s)
    throw std::invalid_argument("SimEnv: bad slot timing");

  prop_.carrier_hz = scenario_.config.carrier_hz;
  prop_.ue_height_m = scenario_.config.ue_height_m;
  config_.budget.tx_power_dbm = scenario_.config.tx_power_dbm;
  codebook_ = build_codebook(config_.array, config_.codebook_grid);

  const int m = horizon();
  const int b = num_bs();
  static_paths_.resize(static_cast<std::size_t>(m) * b);
  for (int slot = 1; slot <= m; ++slot) {
    for (int bs = 1; bs <= b; ++bs) {
      static_paths_[static_cast<std::size_t>(slot - 1) * b + (bs - 1)] = trace_static_paths(
          scenario_.scene, scenario_.base_stations[static_cast<std::size_t>(bs - 1)],
          ue_position(slot), prop_);
    }
  }
}

Vec3 SimEnv::ue_position(int slot) const {
  const auto& wp = scenario_.trajectory.waypoints.at(static_cast<std::size_t>(slot - 1));
  return {wp[0], wp[1], scenario_.config.ue_height_m};
}

const ChannelVector& SimEnv::channel(int slot, int bs) {
  auto& entry = channel_cache_[static_cast<std::size_t>(slot - 1) * num_bs() + (bs - 1)];
  if (!entry) {
    const auto& site = scenario_.base_stations[static_cast<std::size_t>(bs - 1)];
    std::vector<TracedPath> paths =
        static_paths_[static_cast<std::size_t>(slot - 1) * num_bs() + (bs - 1)];
    const Vec3 ue = ue_position(slot);
    for (TracedPath& p : paths) p.loss_db += obstacle_extra_loss_db(p, site, ue, obstacles_);

    std::stable_sort(paths.begin(), paths.end(),
                     [](const TracedPath& a, const TracedPath& b) { return a.loss_db < b.loss_db; });
    const double best = paths.front().loss_db;
    std::erase_if(paths,
                  [&](const TracedPath& p) { return p.loss_db > best + prop_.drop_threshold_db; });
    if (static_cast<int>(paths.size()) > prop_.l_max)
      paths.resize(static_cast<std::size_t>(prop_.l_max));

    // Counter-based fading phases: independent of evaluation order.
    std::vector<PathGain> gains = to_path_gains(paths);
    for (std::size_t i = 0; i < gains.size(); ++i) {
      const std::uint64_t bits =
          rng::mix(fading_seed_, static_cast<std::uint64_t>(slot),
                   static_cast<std::uint64_t>(bs), static_cast<std::uint64_t>(i));
      const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
      gains[i].gain *= std::polar(1.0, 2.0 * std::numbers::pi * u);
    }
    entry = assemble_channel(gains, config_.array);
  }
  return *entry;
}

double SimEnv::measure_snr(int slot, int bs, const Direction& dir) {
  return snr_db(channel(slot, bs), beam_vector(dir.az_deg, dir.el_deg, config_.array),
                config_.budget);
}

TrainingOutcome SimEnv::full_training(int slot, int bs) {
  return initial_beam_training(
      [&](const Direction& d) { return measure_snr(slot, bs, d); }, codebook_, config_.slot_s);
}

State SimEnv::reset(std::uint64_t realization) {
  realization_ = realization;
  fading_seed_ = rng::substream_seed(master_seed_, "fading", realization);
  rng::Stream obstacle_rng(rng::substream_seed(master_seed_, "obstacles", realization));
  obstacles_ = sample_obstacles(scenario_.scene, scenario_.config,
                                scenario_.config.obstacle_density_per_m2, obstacle_rng);
  obstacles_.seed = realization;
  channel_cache_.assign(static_cast<std::size_t>(horizon()) * num_bs(), std::nullopt);

  const TrainingOutcome initial = full_training(1, 1);
  beam_ = initial.direction;
  state_ = State{1, 1, initial.snr_db, 0};
  finished_ = false;
  return state_;
}

StepOutcome SimEnv::step(Action action) {
  if (finished_) throw std::logic_error("SimEnv::step: episode finished");
  if (action < 0 || action > num_bs()) throw std::invalid_argument("SimEnv::step: invalid action");

  const int slot = state_.location;
  StepOutcome out;
  out.slot = slot;
  out.action = action;

  int serving = state_.serving_bs;
  double snr_used = state_.snr_db;
  int indicator = 0;

  if (state_.snr_db >= config_.snr_thr_db) {
    // Association and beam already good enough: no training this slot.
    out.gate_passed = true;
  } else if (action != 0) {
    // Handover execution (a == serving re-runs full training, not counted).
    out.handover_executed = (action != serving);
    serving = action;
    const TrainingOutcome t = full_training(slot, serving);
    beam_ = t.direction;
    snr_used = t.snr_db;
    out.tau_b_s = config_.slot_s / 3.0;
  } else {
    // Beam tracking on the serving BS.
    indicator = 1;
    const std::vector<Direction> dirs = sorted_neighborhood(beam_, config_.neighborhood);
    const TrackingResult tr = track_beam(
        [&](const Direction& d) { return measure_snr(slot, serving, d); }, dirs,
        config_.snr_thr_db, config_.beam_test_s);
    beam_ = tr.direction;
    snr_used = tr.snr_db;
    out.cnt = tr.cnt;
    out.tau_b_s = tr.tau_b_s;

    if (!tr.met_threshold) {
      const double gamma_try =
          throughput(rate_from_snr_db(snr_used), out.tau_b_s, config_.slot_s);
      if (gamma_try <= config_.throughput_thr) {
        // Reactive fallback: exhaustive re-association over all BSs.
        int best_bs = serving;
        TrainingOutcome best;
        best.snr_db = kSnrFloorDb;
        for (int bs = 1; bs <= num_bs(); ++bs) {
          const TrainingOutcome t = full_training(slot, bs);
          if (bs == 1 || t.snr_db > best.snr_db) {
            best = t;
            best_bs = bs;
          }
        }
        serving = best_bs;
        beam_ = best.direction;
        snr_used = best.snr_db;
        out.tau_b_s += config_.slot_s / 3.0;
        out.reactive_fallback = true;
      }
    }
  }

  out.snr_db = snr_used;
  out.rate = rate_from_snr_db(snr_used);
  out.throughput = throughput(out.rate, out.tau_b_s, config_.slot_s);
  out.reward = reward(out.throughput, config_.throughput_thr, config_.lambda);

  if (slot == horizon()) {
    finished_ = true;
    out.terminal = true;
    state_ = State{slot, serving, snr_used, indicator};
  } else {
    // Entry SNR of the next slot: previous beam at the new location.
    const double next_snr = measure_snr(slot + 1, serving, beam_);
    state_ = State{slot + 1, serving, next_snr, indicator};
  }
  out.next = state_;
  return out;
}

std::vector<SlotRecord> run_episode(MdpEnv& env, const Policy& policy, std::uint64_t realization) {
  std::vector<SlotRecord> trace;
  trace.reserve(static_cast<std::size_t>(env.horizon()));
  State s = env.reset(realization);
  while (!env.finished()) {
    const StepOutcome out = env.step(policy(s));
    const auto xy = env.location_xy(out.slot);
    trace.push_back({out, xy[0], xy[1]});
    s = out.next;
  }
  return trace;
}

void write_trace_csv(const std::vector<SlotRecord>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace: " + path);
  out << "slot,x,y,serving_bs,action,snr_db,cnt,tau_b_us,rate,throughput,reward,handover,fallback\n";
  char line[512];
  for (const SlotRecord& r : trace) {
    const StepOutcome& o = r.outcome;
    std::snprintf(line, sizeof(line), "%d,%.9g,%.9g,%d,%d,%.9g,%d,%.9g,%.9g,%.9g,%.9g,%d,%d\n",
                  o.slot, r.x, r.y, o.next.serving_bs, o.action, o.snr_db, o.cnt,
                  o.tau_b_s * 1e6, o.rate, o.throughput, o.reward,
                  o.handover_executed ? 1 : 0, o.reactive_fallback ? 1 : 0);
    out << line;
  }
}

}  // namespace mmwsim
