#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include <mmwsim/baselines.hpp>

using namespace mmwsim;

namespace {

Scenario bench_scenario() {
  ScenarioConfig cfg;
  cfg.world_min = {0, 0, 0};
  cfg.world_max = {200, 120, 30};
  cfg.corridor = Corridor{0, {0, 40, 0}, {200, 80, 0}};
  cfg.building_count = 12;
  cfg.bs_count = 10;
  cfg.traj_slots = 100;
  cfg.tx_power_dbm = -18.0;
  return build_scenario(cfg, 7);
}

void BM_ChannelAssembly(benchmark::State& state) {
  const ArrayGeometry geom;
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> az(-60.0, 60.0), el(-20.0, 20.0);
  std::vector<PathGain> paths;
  for (int l = 0; l < static_cast<int>(state.range(0)); ++l)
    paths.push_back({Cx{1e-4, 2e-5}, az(gen), el(gen)});
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_channel(paths, geom));
  }
}
BENCHMARK(BM_ChannelAssembly)->Arg(1)->Arg(3)->Arg(8);

void BM_CodebookBuild(benchmark::State& state) {
  const ArrayGeometry geom;
  const CodebookGrid grid;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_codebook(geom, grid));
  }
}
BENCHMARK(BM_CodebookBuild);

void BM_TrackBeam(benchmark::State& state) {
  const auto sorted = sorted_neighborhood(Direction{10.0, -5.0}, NeighborhoodSpec{});
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> snr(-8.0, 6.0);
  std::vector<double> map(sorted.size());
  for (double& v : map) v = snr(gen);
  auto measure = [&](const Direction& d) {
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if (sorted[i] == d) return map[i];
    return kSnrFloorDb;
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(track_beam(measure, sorted, 2.0, 10e-6));
  }
}
BENCHMARK(BM_TrackBeam);

void BM_EnvEpisode(benchmark::State& state) {
  const Scenario sc = bench_scenario();
  SimEnv env(sc, EnvConfig{}, 42);
  std::uint64_t realization = 0;
  for (auto _ : state) {
    env.reset(++realization);
    while (!env.finished()) benchmark::DoNotOptimize(env.step(0));
  }
  state.SetItemsProcessed(state.iterations() * sc.trajectory.slots());
}
BENCHMARK(BM_EnvEpisode)->Unit(benchmark::kMillisecond);

void BM_PolicyForward(benchmark::State& state) {
  MlpNetwork net({13, 64, 64, 11}, 3);
  std::vector<double> input(13, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(input));
  }
}
BENCHMARK(BM_PolicyForward);

}  // namespace

BENCHMARK_MAIN();
