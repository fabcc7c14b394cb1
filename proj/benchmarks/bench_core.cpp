#include <benchmark/benchmark.h>

#include "seclat/bounds.hpp"
#include "seclat/lead.hpp"
#include "seclat/pmf.hpp"
#include "seclat/rng.hpp"
#include "seclat/sim.hpp"

namespace {

using namespace seclat;

ModelParams btc_params(int k) {
  ModelParams p;
  p.mu_m = 1.0 / 600.0;
  p.alpha = 0.9;
  p.k = k;
  p.delay = DelaySpec::erlang(2, 1.0);
  return p;
}

Pmf random_pmf(int n, uint64_t seed) {
  Rng rng(seed, 0);
  std::vector<double> m(static_cast<size_t>(n));
  double sum = 0.0;
  for (auto& v : m) sum += (v = rng.uniform());
  for (auto& v : m) v /= sum;
  return Pmf::from_masses(0, std::move(m));
}

void BM_Convolve(benchmark::State& state) {
  const Pmf a = random_pmf(static_cast<int>(state.range(0)), 1);
  const Pmf b = random_pmf(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(convolve(a, b));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Convolve)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_PowerConvolve(benchmark::State& state) {
  const Pmf cycle = convolve(c_alpha_pmf(0.9),
                             mixed_poisson_pmf(DelaySpec::erlang(2, 1.0),
                                               1.0 / 600.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(power_convolve(cycle,
                                            static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_PowerConvolve)->Arg(6)->Arg(25);

void BM_Stationary(benchmark::State& state) {
  const ZIncrement z = build_z(btc_params(6), true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ramaswami_stationary(z));
  }
}
BENCHMARK(BM_Stationary);

void BM_BoundsPoint(benchmark::State& state) {
  const ModelParams p = btc_params(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_bounds(p));
  }
}
BENCHMARK(BM_BoundsPoint)->Arg(6)->Arg(25);

void BM_SimulateTrials(benchmark::State& state) {
  SimConfig cfg;
  cfg.params = btc_params(6);
  cfg.trials = state.range(0);
  cfg.seed = 7;
  cfg.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateTrials)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
