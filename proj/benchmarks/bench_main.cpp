#include <benchmark/benchmark.h>

#include "effmed/harness.hpp"
#include "effmed/observables.hpp"
#include "effmed/specfun.hpp"

namespace {

using effmed::complex;

void BM_SphericalBessel(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  const complex z{3.7, 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(effmed::specfun::spherical_bessel(n_max, z));
}
BENCHMARK(BM_SphericalBessel)->Arg(20)->Arg(50)->Arg(200);

void BM_SphericalBesselLargeImag(benchmark::State& state) {
  const complex z{1.0, -20.0};
  for (auto _ : state) benchmark::DoNotOptimize(effmed::specfun::spherical_bessel(50, z));
}
BENCHMARK(BM_SphericalBesselLargeImag);

void BM_MieCoeffs(benchmark::State& state) {
  const effmed::PhysicalParams p;
  const auto c = effmed::make_contrast(p, 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(effmed::mie_coeffs(p, c, 17));
}
BENCHMARK(BM_MieCoeffs);

void BM_FarFieldDifference(benchmark::State& state) {
  const effmed::PhysicalParams p;
  const auto c = effmed::make_contrast(p, 1e-2);
  const auto m = effmed::mie_coeffs(p, c, 17);
  for (auto _ : state) benchmark::DoNotOptimize(effmed::far_field_difference(p, m));
}
BENCHMARK(BM_FarFieldDifference);

void BM_DefaultSweep(benchmark::State& state) {
  const effmed::PhysicalParams p;
  const auto grid = effmed::default_eps_grid();
  effmed::SweepOptions opts;
  opts.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(effmed::sweep(p, grid, opts));
}
BENCHMARK(BM_DefaultSweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
