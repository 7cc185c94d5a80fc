#include <benchmark/benchmark.h>

#include <cmath>

#include <fractal_hodge/derham.hpp>
#include <fractal_hodge/harmonic.hpp>
#include <fractal_hodge/kusuoka.hpp>

using namespace fractal_hodge;

static void BM_BuildGraph(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int level = static_cast<int>(state.range(1));
  const int m = static_cast<int>(state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(GasketGraph::build(n, level, m));
}
BENCHMARK(BM_BuildGraph)->Args({2, 2, 6})->Args({2, 3, 4})->Args({3, 2, 4})->Unit(benchmark::kMillisecond);

static void BM_AssembleD(benchmark::State& state) {
  const auto g = GasketGraph::build(2, 3, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_d(g, 1));
}
BENCHMARK(BM_AssembleD)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_Laplacian(benchmark::State& state) {
  const auto g = GasketGraph::build(2, 3, static_cast<int>(state.range(0)));
  const auto mu = unit_weights(g);
  for (auto _ : state) benchmark::DoNotOptimize(laplacian(g, mu, 1));
}
BENCHMARK(BM_Laplacian)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_HarmonicSpace(benchmark::State& state) {
  const auto g = GasketGraph::build(2, 3, static_cast<int>(state.range(0)));
  const auto mu = unit_weights(g);
  for (auto _ : state) benchmark::DoNotOptimize(harmonic_space(g, mu, 1));
}
BENCHMARK(BM_HarmonicSpace)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_HarmonicOneBasis(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(harmonic_one_basis(2, 3, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_HarmonicOneBasis)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_NuOmega(benchmark::State& state) {
  const auto model = derive_transfer();
  for (auto _ : state) benchmark::DoNotOptimize(nu_omega_n(model, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_NuOmega)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_MeasureIdentity(benchmark::State& state) {
  const SampledFunction f = [](const Point3& x) { return std::exp(x[1]) + std::cos(2 * x[2]); };
  for (auto _ : state) benchmark::DoNotOptimize(check_measure_identity(f, 1, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_MeasureIdentity)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
