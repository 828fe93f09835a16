#include <benchmark/benchmark.h>

#include <vector>

#include "smalljump/charfn.hpp"
#include "smalljump/estimators.hpp"
#include "smalljump/sampling.hpp"
#include "smalljump/selection.hpp"

using namespace smalljump;

namespace {

ProcessConfig config(TemperedStableParams p, double delta, std::size_t n)
{
  ProcessConfig c;
  c.params = p;
  c.delta = delta;
  c.n = n;
  return c;
}

const IncrementSample& stable_sample(std::size_t n)
{
  static std::vector<IncrementSample> cache;
  for (const auto& s : cache)
    if (s.values.size() == n)
      return s;
  cache.push_back(sample_stable_increments(config({ 1, 1, 0, 0, 1.1 }, 0.1, n), 1));
  return cache.back();
}

void BM_EcfUniformNufft(benchmark::State& state)
{
  const auto& s = stable_sample(static_cast<std::size_t>(state.range(0)));
  const auto count = static_cast<std::size_t>(state.range(1));
  const UniformEcfPlan plan(0.02, count);
  for (auto _ : state)
    benchmark::DoNotOptimize(plan.evaluate(s.values));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_EcfUniformNufft)->Args({ 1000, 2000 })->Args({ 10000, 2000 })->Args({ 10000, 50000 });

void BM_EcfPhasorSum(benchmark::State& state)
{
  const auto& s = stable_sample(static_cast<std::size_t>(state.range(0)));
  const auto count = static_cast<std::size_t>(state.range(1));
  std::vector<Complex> out(count);
  for (auto _ : state) {
    for (std::size_t k = 0; k < count; ++k)
      out[k] = empirical_cf(s.values, 0.02 * static_cast<double>(k));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_EcfPhasorSum)->Args({ 1000, 2000 })->Args({ 10000, 2000 });

void BM_CfSmallJumps(benchmark::State& state)
{
  const auto c = state.range(0) == 0 ? config({ 1, 1, 0, 0, 0.7 }, 1.0, 1) : config({ 2, 0, 1, 0, 0.7 }, 1.0, 1);
  double u = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cf_small_jumps(c, u));
    u = u < 50.0 ? u * 1.1 : 0.5;
  }
  state.SetLabel(state.range(0) == 0 ? "stable" : "tempered");
}
BENCHMARK(BM_CfSmallJumps)->Arg(0)->Arg(1);

void BM_SelectCutoff(benchmark::State& state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto c = config({ 1, 1, 0, 0, 1.1 }, 0.1, n);
  const auto& s = stable_sample(n);
  const auto grid = CutoffGrid::geometric(1.0, n, 1.01, 200.0);
  const auto nf = noise_cf(c, EstimatorKind::KnownNoise);
  const double ld = big_jump_intensity(c.params, 1.0) * c.delta;
  for (auto _ : state)
    benchmark::DoNotOptimize(select_cutoff(s.values, grid, nf, ld, kDefaultKappa).m_hat);
}
BENCHMARK(BM_SelectCutoff)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_InvertSpectrum(benchmark::State& state)
{
  const auto c = config({ 1, 1, 0, 0, 1.1 }, 0.1, 1);
  const auto grid = default_x_grid(c, 2048);
  const double step = mesh_step(grid);
  const double m = static_cast<double>(state.range(0));
  const auto w = cutoff_weights(step, m);
  const auto spectrum = small_jump_spectrum(c, step, w.size());
  for (auto _ : state)
    benchmark::DoNotOptimize(invert_spectrum(spectrum, step, w, grid));
}
BENCHMARK(BM_InvertSpectrum)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
