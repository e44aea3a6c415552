// Serial reference path vs OpenMP execution for the bootstrap and study loops.

#include <benchmark/benchmark.h>

#include "inar/bootstrap.hpp"
#include "inar/simulate.hpp"
#include "inar/study.hpp"

using namespace inar;

namespace {

const CountSeries& series() {
  static const CountSeries s = [] {
    RandomStream rng(SeedSpec(7));
    return simulate_inar(InarModel{{0.5}, make_pmf(PoissonFamily{1.0})}, 500, kDefaultBurnIn, rng);
  }();
  return s;
}

void BM_Bootstrap(benchmark::State& state) {
  const FitResult fit = npmle_fit(series(), 1);
  OptimizerConfig cfg;
  cfg.restarts = 1;
  BootstrapOptions options;
  options.exec.threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sp_inar_bootstrap(series(), fit, 64, cfg, SeedSpec(8), options));
  }
  state.SetItemsProcessed(state.iterations() * 64);
}

void BM_Study(benchmark::State& state) {
  StudyConfig cfg;
  cfg.n_grid = {300};
  cfg.K = 8;
  cfg.B = 25;
  cfg.targets = {Target::parse("alpha"), Target::parse("predictive")};
  cfg.optimizer.restarts = 1;
  RunOptions options;
  options.exec.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_study(cfg, options));
}

}  // namespace

// threads = 1 runs the serial reference loop.
BENCHMARK(BM_Bootstrap)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Study)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
