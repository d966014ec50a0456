// Serial reference kernels against their OpenMP counterparts, plus cold and
// warm-started branch and bound on a lower-bounding program.

#include <benchmark/benchmark.h>

#include <cmath>

#include "nne/continuous.hpp"
#include "nne/cutting_plane.hpp"
#include "nne/experiment.hpp"
#include "nne/knapsack.hpp"
#include "nne/milp.hpp"

using namespace nne;

namespace {

const continuous::PowerConstraintGame kGame;

double wavy(const continuous::Point2& y) { return std::sin(13 * y[0]) * std::cos(7 * y[1]) - y[0] * y[1]; }
bool feasible(const continuous::Point2& y) { return kGame.feasible(y); }

void BM_GridScanSerial(benchmark::State& state) {
  const continuous::GridBox box{0.0, 1.0, 0.0, 1.0, static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(continuous::scan_grid_serial(wavy, feasible, box));
}

void BM_GridScanOpenMP(benchmark::State& state) {
  const continuous::GridBox box{0.0, 1.0, 0.0, 1.0, static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(continuous::scan_grid(wavy, feasible, box));
}

knapsack::Instance brute_instance(benchmark::State& state) {
  return knapsack::generate_instance({1, static_cast<std::size_t>(state.range(0)), 3, 1000});
}

void BM_BruteForceSerial(benchmark::State& state) {
  const auto inst = brute_instance(state);
  for (auto _ : state) benchmark::DoNotOptimize(knapsack::brute_force_mnd_serial(inst));
}

void BM_BruteForceOpenMP(benchmark::State& state) {
  const auto inst = brute_instance(state);
  for (auto _ : state) benchmark::DoNotOptimize(knapsack::brute_force_mnd(inst));
}

void BM_Batch(benchmark::State& state) {
  experiment::BatchConfig cfg;
  cfg.pairs = {{3, 4}};
  cfg.instances = 20;
  cfg.workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(experiment::run_batch(cfg));
}

void BM_LowerBounding(benchmark::State& state) {
  const auto inst = knapsack::generate_instance({8, 5, 8, 1000});
  const knapsack::KnapsackMnd problem(inst);
  const auto lbp = knapsack::build_lbp(inst, cutting::initialize_cuts_joint(problem));
  milp::MipOptions options;
  options.objective_step = 1.0;
  options.warm_start = state.range(0) != 0;
  std::size_t nodes = 0;
  for (auto _ : state) nodes = milp::solve_mip(lbp, options).nodes;
  state.counters["nodes"] = static_cast<double>(nodes);
}

}  // namespace

BENCHMARK(BM_GridScanSerial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridScanOpenMP)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceSerial)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceOpenMP)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Batch)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LowerBounding)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
