#include <benchmark/benchmark.h>

#include <numbers>

#include "pmlrate/harness.hpp"
#include "pmlrate/rate.hpp"
#include "pmlrate/solver.hpp"
#include "pmlrate/special.hpp"

namespace {

using namespace pml;

const PmlProfile& disk_profile() {
  static const PmlProfile p(ScalingFn::make(ScalingKind::cubic, 2.0, 4.0), std::numbers::pi / 4);
  return p;
}

void BM_Phi(benchmark::State& state) {
  const PmlProfile p(ScalingFn::make(ScalingKind::poly8, 3.0, 5.0), 0.7);
  double r = 3.0;
  for (auto _ : state) {
    r = r > 6.0 ? 3.0 : r + 1e-3;
    benchmark::DoNotOptimize(phi(p, 2, r));
  }
}
BENCHMARK(BM_Phi);

void BM_IntegralPhi(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(integral_phi(disk_profile(), 2, 2.0, 2.8, 1e-12));
}
BENCHMARK(BM_IntegralPhi);

void BM_Theta0(benchmark::State& state) {
  const auto s = ScalingFn::make(ScalingKind::cubic, 3.0, 6.0);
  for (auto _ : state) benchmark::DoNotOptimize(theta0(0.5, s, 2, 3.5));
}
BENCHMARK(BM_Theta0);

void BM_BesselJY(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(special::bessel_jy(n, 17.3));
}
BENCHMARK(BM_BesselJY)->Arg(0)->Arg(10)->Arg(60);

void BM_RadialModeSolve(benchmark::State& state) {
  RadialModeProblem p{2, 3, 20.0, 1.0, 2.8, disk_profile(), static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(radial_mode_solve(p, 1.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RadialModeSolve)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

void BM_ScatteringSolve(benchmark::State& state) {
  ScatteringConfig c;
  c.k = static_cast<double>(state.range(0));
  c.profile = disk_profile();
  c.R1 = 2.0;
  c.R_tr = 2.8;
  for (auto _ : state) benchmark::DoNotOptimize(pml_scattering_solve(c));
}
BENCHMARK(BM_ScatteringSolve)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_OneDClosedFormRow(benchmark::State& state) {
  SweepSpec s;
  s.base = OneDConfig{};
  s.values = {20.0, 40.0, 80.0};
  for (auto _ : state) benchmark::DoNotOptimize(run_row(s, 40.0));
}
BENCHMARK(BM_OneDClosedFormRow)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
