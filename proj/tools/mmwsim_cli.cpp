// mmwsim: scenario generation, policy training, and paired evaluation for the
// joint handover / beam-tracking simulator.
//
// Exit codes: 0 ok, 2 configuration error, 3 training failure, 4 artifact
// mismatch.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mmwsim/baselines.hpp"
#include "mmwsim/checkpoint.hpp"
#include "mmwsim/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mmwsim;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitTraining = 3;
constexpr int kExitMismatch = 4;

std::uint64_t file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return rng::fnv1a(ss.str());
}

Scenario load_scenario_for_run(const std::string& path, int traj_slots) {
  Scenario sc = load_scenario(path);
  if (traj_slots > 0 && traj_slots != sc.config.traj_slots) {
    ScenarioConfig cfg = sc.config;
    cfg.traj_slots = traj_slots;
    sc = build_scenario(cfg, cfg.seed);
  }
  return sc;
}

void write_manifest(const json& j, const std::string& out_dir) {
  std::ofstream out(fs::path(out_dir) / "manifest.json");
  out << j.dump(2) << "\n";
}

json train_config_json(const TrainConfig& cfg) {
  return json{{"discount", cfg.discount},
              {"episodes", cfg.episodes},
              {"eps_start", cfg.eps_start},
              {"eps_end", cfg.eps_end},
              {"lr", cfg.lr},
              {"batch_size", cfg.batch_size},
              {"buffer_capacity", cfg.buffer_capacity},
              {"target_sync_period", cfg.target_sync_period},
              {"train_every", cfg.train_every},
              {"warmup_transitions", cfg.warmup_transitions},
              {"hidden_layers", cfg.hidden_layers},
              {"seed", cfg.seed},
              {"handover_only", cfg.handover_only},
              {"reward_signal", cfg.reward_signal == RewardSignal::Rate ? "rate" : "env_reward"},
              {"snr_min_db", cfg.snr_min_db},
              {"snr_max_db", cfg.snr_max_db}};
}

struct EvalResult {
  std::vector<std::vector<SlotRecord>> traces;
};

// Realizations run in a worker pool; traces are collected by realization
// index, so the reduction order is deterministic regardless of scheduling.
EvalResult evaluate_policy(const Scenario& scenario, const EnvConfig& env_cfg,
                           std::uint64_t master_seed, int realizations, int workers,
                           const std::function<std::vector<SlotRecord>(SimEnv&, std::uint64_t)>& run) {
  EvalResult result;
  result.traces.resize(static_cast<std::size_t>(realizations));
  if (workers < 1) workers = 1;
  workers = std::min<int>(workers, realizations);

  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      SimEnv env(scenario, env_cfg, master_seed);
      for (int r = next.fetch_add(1); r < realizations; r = next.fetch_add(1)) {
        result.traces[static_cast<std::size_t>(r)] =
            run(env, static_cast<std::uint64_t>(r) + 1);
      }
    });
  }
  for (auto& t : pool) t.join();
  return result;
}

int cmd_generate(const std::string& config_path, std::uint64_t seed, const std::string& out_path) {
  ScenarioConfig cfg;
  try {
    cfg = load_scenario_config(config_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  Scenario sc;
  try {
    sc = build_scenario(cfg, seed);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  save_scenario(sc, out_path);
  const double area = (sc.scene.world_max.x - sc.scene.world_min.x) *
                      (sc.scene.world_max.y - sc.scene.world_min.y);
  std::printf("scenario written to %s: %d BSs, M=%d, %zu buildings, world area %.0f m^2\n",
              out_path.c_str(), static_cast<int>(sc.base_stations.size()),
              sc.trajectory.slots(), sc.scene.buildings.size(), area);
  return 0;
}

int cmd_train(const std::string& scene_path, const std::string& method, TrainConfig cfg,
              int traj_slots, const std::string& out_dir) {
  if (method != "proposed" && method != "baseline2") {
    std::fprintf(stderr, "config error: method '%s' is not trainable (expected proposed|baseline2)\n",
                 method.c_str());
    return kExitConfig;
  }
  Scenario sc;
  try {
    sc = load_scenario_for_run(scene_path, traj_slots);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  fs::create_directories(out_dir);

  EnvConfig env_cfg;
  SimEnv env(sc, env_cfg, cfg.seed);
  TrainResult result;
  try {
    if (method == "baseline2") {
      result = train_learned_handover(env, cfg);
      cfg.handover_only = true;
      cfg.reward_signal = RewardSignal::Rate;
    } else {
      result = train(env, cfg);
    }
  } catch (const TrainingError& e) {
    std::fprintf(stderr, "training failure: %s\n", e.what());
    return kExitTraining;
  }

  const std::string ckpt = (fs::path(out_dir) / "checkpoint.json").string();
  save_policy(result.policy, method, ckpt);
  write_learning_curve_csv(result, (fs::path(out_dir) / "curve.csv").string());

  json manifest;
  manifest["command"] = "train";
  manifest["scene"] = scene_path;
  manifest["scene_hash"] = file_hash(scene_path);
  manifest["method"] = method;
  manifest["traj_slots"] = sc.trajectory.slots();
  manifest["train_config"] = train_config_json(cfg);
  write_manifest(manifest, out_dir);

  std::printf("trained %s over %d episodes; checkpoint %s\n", method.c_str(), cfg.episodes,
              ckpt.c_str());
  return 0;
}

struct EvalSpec {
  std::string method;       // proposed | baseline1 | baseline2
  std::string policy_path;  // empty for baseline1
};

int run_evaluation(const std::string& scene_path, const std::vector<EvalSpec>& specs,
                   int realizations, std::uint64_t seed, int workers, int traj_slots,
                   const std::string& out_dir, bool write_traces) {
  Scenario sc;
  try {
    sc = load_scenario_for_run(scene_path, traj_slots);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  fs::create_directories(out_dir);
  EnvConfig env_cfg;

  std::vector<MethodSummary> summaries;
  json manifest;
  manifest["command"] = "evaluate";
  manifest["scene"] = scene_path;
  manifest["scene_hash"] = file_hash(scene_path);
  manifest["seed"] = seed;
  manifest["realizations"] = realizations;
  manifest["traj_slots"] = sc.trajectory.slots();
  json realization_ids = json::array();
  for (int r = 1; r <= realizations; ++r) realization_ids.push_back(r);
  manifest["realization_ids"] = realization_ids;
  json methods_json = json::array();

  for (const EvalSpec& spec : specs) {
    std::string label = spec.method;
    std::function<std::vector<SlotRecord>(SimEnv&, std::uint64_t)> run;
    if (spec.method == "baseline1") {
      if (sc.base_stations.size() < 2) {
        std::fprintf(stderr, "config error: baseline1 needs at least two BSs\n");
        return kExitConfig;
      }
      run = [](SimEnv& env, std::uint64_t r) { return run_multiconnectivity(env, r); };
    } else {
      LoadedPolicy lp;
      try {
        lp = load_policy(spec.policy_path);
      } catch (const CheckpointError& e) {
        std::fprintf(stderr, "artifact mismatch: %s\n", e.what());
        return kExitMismatch;
      }
      if (lp.policy.num_bs != static_cast<int>(sc.base_stations.size())) {
        std::fprintf(stderr, "artifact mismatch: checkpoint has %d BSs, scene has %zu\n",
                     lp.policy.num_bs, sc.base_stations.size());
        return kExitMismatch;
      }
      if (!lp.method.empty()) label = lp.method;
      auto policy = std::make_shared<QPolicy>(lp.policy);
      policy->horizon = sc.trajectory.slots();
      run = [policy](SimEnv& env, std::uint64_t r) {
        return run_episode(env, [&](const State& s) { return policy->greedy(s); }, r);
      };
    }

    const EvalResult result = evaluate_policy(sc, env_cfg, seed, realizations, workers, run);
    if (write_traces) {
      for (int r = 0; r < realizations; ++r) {
        char name[128];
        std::snprintf(name, sizeof(name), "trace_%s_%04d.csv", label.c_str(), r + 1);
        write_trace_csv(result.traces[static_cast<std::size_t>(r)],
                        (fs::path(out_dir) / name).string());
      }
    }
    const RunSummary summary = summarize(result.traces, env_cfg.throughput_thr);
    write_summary_json(summary, label,
                       (fs::path(out_dir) / ("summary_" + label + ".json")).string());
    summaries.push_back({label, summary});
    methods_json.push_back({{"method", label},
                            {"policy", spec.policy_path},
                            {"policy_hash", spec.policy_path.empty()
                                                ? 0
                                                : file_hash(spec.policy_path)}});
    std::printf("%s: throughput %.3f +- %.3f, unmet %.2f +- %.2f, handovers %.2f +- %.2f\n",
                label.c_str(), summary.aggregate_throughput_mean,
                summary.aggregate_throughput_ci, summary.unmet_mean, summary.unmet_ci,
                summary.handover_mean, summary.handover_ci);
  }

  if (summaries.size() > 1) {
    const auto rows = compare(summaries);
    write_comparison_csv(rows, (fs::path(out_dir) / "comparison.csv").string());
  }
  manifest["methods"] = methods_json;
  write_manifest(manifest, out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmWave joint handover / beam tracking simulator"};
  app.require_subcommand(1);

  // generate
  std::string config_path, out_path = "scene.json";
  std::uint64_t seed = 1;
  auto* generate = app.add_subcommand("generate", "Generate a scenario from a config");
  generate->add_option("--config", config_path, "scenario config JSON")->required();
  generate->add_option("--seed", seed, "master seed");
  generate->add_option("--out", out_path, "output scenario path");

  // train
  std::string scene_path, method = "proposed", out_dir = "out";
  int traj_slots = 0;
  TrainConfig tcfg;
  auto* train_cmd = app.add_subcommand("train", "Train a policy on a scenario");
  train_cmd->add_option("--scene", scene_path, "scenario JSON")->required();
  train_cmd->add_option("--method", method, "proposed|baseline2");
  train_cmd->add_option("--episodes", tcfg.episodes, "training episodes");
  train_cmd->add_option("--seed", tcfg.seed, "master seed");
  train_cmd->add_option("--traj-slots", traj_slots, "override trajectory length M");
  train_cmd->add_option("--train-every", tcfg.train_every, "env steps per gradient step");
  train_cmd->add_option("--out-dir", out_dir, "output directory");

  // evaluate
  std::string policy_path;
  int realizations = 500;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  bool no_traces = false;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a policy or baseline");
  evaluate->add_option("--scene", scene_path, "scenario JSON")->required();
  evaluate->add_option("--policy", policy_path, "policy checkpoint JSON");
  evaluate->add_option("--method", method, "proposed|baseline1|baseline2");
  evaluate->add_option("--realizations", realizations, "channel realizations");
  evaluate->add_option("--seed", seed, "master seed");
  evaluate->add_option("--workers", workers, "worker threads");
  evaluate->add_option("--traj-slots", traj_slots, "override trajectory length M");
  evaluate->add_option("--out-dir", out_dir, "output directory");
  evaluate->add_flag("--no-traces", no_traces, "skip per-realization trace CSVs");

  // compare
  std::vector<std::string> method_specs;
  auto* compare_cmd =
      app.add_subcommand("compare", "Paired evaluation of several methods on one scenario");
  compare_cmd->add_option("--scene", scene_path, "scenario JSON")->required();
  compare_cmd
      ->add_option("--methods", method_specs,
                   "method[=checkpoint] entries, e.g. proposed=ckpt.json baseline1")
      ->required();
  compare_cmd->add_option("--realizations", realizations, "channel realizations");
  compare_cmd->add_option("--seed", seed, "master seed");
  compare_cmd->add_option("--workers", workers, "worker threads");
  compare_cmd->add_option("--traj-slots", traj_slots, "override trajectory length M");
  compare_cmd->add_option("--out-dir", out_dir, "output directory");
  compare_cmd->add_flag("--no-traces", no_traces, "skip per-realization trace CSVs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(config_path, seed, out_path);
    if (train_cmd->parsed()) {
      if (method == "baseline1") {
        std::fprintf(stderr, "config error: baseline1 needs no training\n");
        return kExitConfig;
      }
      return cmd_train(scene_path, method, tcfg, traj_slots, out_dir);
    }
    if (evaluate->parsed()) {
      if (method == "baseline1") {
        return run_evaluation(scene_path, {{"baseline1", ""}}, realizations, seed, workers,
                              traj_slots, out_dir, !no_traces);
      }
      if (policy_path.empty()) {
        std::fprintf(stderr, "config error: --policy required unless --method baseline1\n");
        return kExitConfig;
      }
      return run_evaluation(scene_path, {{method, policy_path}}, realizations, seed, workers,
                            traj_slots, out_dir, !no_traces);
    }
    if (compare_cmd->parsed()) {
      std::vector<EvalSpec> specs;
      for (const std::string& spec : method_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) {
          specs.push_back({spec, ""});
        } else {
          specs.push_back({spec.substr(0, eq), spec.substr(eq + 1)});
        }
      }
      for (const EvalSpec& s : specs) {
        if (s.method != "baseline1" && s.policy_path.empty()) {
          std::fprintf(stderr, "config error: method %s requires a checkpoint\n",
                       s.method.c_str());
          return kExitConfig;
        }
      }
      return run_evaluation(scene_path, specs, realizations, seed, workers, traj_slots, out_dir,
                            !no_traces);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
