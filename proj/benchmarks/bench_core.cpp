#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "donorspin/dynamics.hpp"
#include "donorspin/spectroscopy.hpp"

using namespace donorspin;

namespace {

Liouvillian reference_liouvillian() {
  SpinSystemConfig sys;
  DriveSpec pump{Branch::UpElectron, 40.0e6, 0.0};
  DriveSpec probe{Branch::DownElectron, 10.0e6, -150.0e6};
  return make_liouvillian(sys, pump, probe, DissipatorSpec{});
}

void BM_build_liouvillian(benchmark::State& state) {
  SpinSystemConfig sys;
  DriveSpec pump{Branch::UpElectron, 40.0e6, 0.0};
  DriveSpec probe{Branch::DownElectron, 10.0e6, -150.0e6};
  const DissipatorSpec rates;
  for (auto _ : state) {
    Liouvillian liou = make_liouvillian(sys, pump, probe, rates);
    benchmark::DoNotOptimize(liou.matrix);
  }
}
BENCHMARK(BM_build_liouvillian);

void BM_steady_state(benchmark::State& state) {
  const Liouvillian liou = reference_liouvillian();
  for (auto _ : state) {
    DensityMatrix ss = steady_state(liou);
    benchmark::DoNotOptimize(ss.rho);
  }
}
BENCHMARK(BM_steady_state);

void BM_sweep_point(benchmark::State& state) {
  SweepConfig cfg;
  double detuning = -150.0e6;
  for (auto _ : state) {
    const Observables o = observables_at(cfg, detuning);
    benchmark::DoNotOptimize(o.excited_total);
    detuning = -detuning;  // avoid any caching along one branch
  }
}
BENCHMARK(BM_sweep_point);

void BM_time_evolve_1000_steps(benchmark::State& state) {
  const Liouvillian liou = reference_liouvillian();
  const DensityMatrix rho0 = DensityMatrix::ground_mixed();
  const double dt = default_time_step(liou);
  for (auto _ : state) {
    auto samples = time_evolve(liou, rho0, 1000.0 * dt, dt, 1000);
    benchmark::DoNotOptimize(samples.back().state.rho);
  }
}
BENCHMARK(BM_time_evolve_1000_steps);

void BM_find_dips(benchmark::State& state) {
  // Synthetic doublet on the acceptance grid size.
  Spectrum spec;
  const int n = 2001;
  for (int i = 0; i < n; ++i) {
    const double x = -500.0e6 + i * (1000.0e6 / (n - 1));
    auto lorentz = [&](double x0, double w) {
      const double u = (x - x0) / w;
      return 1.0 / (1.0 + u * u);
    };
    spec.probe_detuning_hz.push_back(x);
    spec.signal.push_back(1.0 - 0.5 * lorentz(-196.0e6, 8.0e6) - 0.35 * lorentz(196.0e6, 8.0e6));
  }
  for (auto _ : state) {
    DipReport report = find_dips(spec);
    benchmark::DoNotOptimize(report.separation_hz);
  }
}
BENCHMARK(BM_find_dips);

}  // namespace
