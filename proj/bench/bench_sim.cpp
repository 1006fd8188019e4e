#include <benchmark/benchmark.h>

#include "symdisc/sim.hpp"

namespace {

using namespace symdisc;

SimConfig bench_config(long long trials, int threads) {
  SimConfig cfg;
  cfg.trials = trials;
  cfg.seed = 7;
  cfg.pbs_extinction = 1e4;
  cfg.phase_noise_sigma = 0.02;
  cfg.detector_efficiency = 0.9;
  cfg.heralding_efficiency = 0.9;
  cfg.threads = threads;
  return cfg;
}

AngleVector bench_angles() {
  return AngleVector{{1.0471975511965976, 0.9424777960769379, 0.7853981633974483}};
}

void BM_trials_serial(benchmark::State& state) {
  SimConfig cfg = bench_config(state.range(0), 1);
  AngleVector angles = bench_angles();
  for (auto _ : state) {
    auto records = generate_trials_serial(cfg, angles);
    benchmark::DoNotOptimize(records.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_trials_serial)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_trials_parallel(benchmark::State& state) {
  SimConfig cfg = bench_config(state.range(0), 0);
  AngleVector angles = bench_angles();
  for (auto _ : state) {
    auto records = generate_trials(cfg, angles);
    benchmark::DoNotOptimize(records.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_trials_parallel)->Arg(1000)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
