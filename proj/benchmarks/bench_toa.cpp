#include <benchmark/benchmark.h>

#include <cmath>

#include "toa/arrival.hpp"
#include "toa/detector.hpp"
#include "toa/quadrature.hpp"
#include "toa/state.hpp"
#include "toa/wigner.hpp"

namespace {

toa::DetectorModel fd_gaussian_spread(double g) {
  toa::DetectorModel d;
  d.kind = toa::DetectorKind::fully_decoherent;
  d.alpha.form = toa::Absorption::Form::exp_family;
  d.alpha.coeff = 1e-3;
  d.alpha.p_log = 1.0;
  d.alpha.p_quad = -g;
  return d;
}

void BM_adaptive_oscillatory(benchmark::State& state) {
  const double freq = static_cast<double>(state.range(0));
  for (auto _ : state) {
    const double v = toa::integrate_oscillatory(
        [freq](double x) { return std::cos(freq * x) * std::exp(-0.1 * x); },
        0.0, 20.0, freq);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_adaptive_oscillatory)->Arg(10)->Arg(100)->Arg(1000);

void BM_gauss_legendre(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    // bypass the cache to time the node computation itself
    std::vector<double> x, w;
    toa::GaussLegendre::get(n).mapped(0.0, 1.0, x, w);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_gauss_legendre)->Arg(64)->Arg(256);

void BM_arrival_amplitude(benchmark::State& state) {
  const toa::MomentumState s = toa::make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  for (auto _ : state) {
    const toa::ArrivalDistribution d =
        toa::arrival_density_amplitude(s, 50.0, 0.0, 0.0);
    benchmark::DoNotOptimize(d.density.data());
  }
}
BENCHMARK(BM_arrival_amplitude)->Unit(benchmark::kMillisecond);

void BM_arrival_kernel(benchmark::State& state) {
  const toa::MomentumState s = toa::make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  const toa::LocalizationKernel kern(fd_gaussian_spread(4.0), 1.0);
  for (auto _ : state) {
    const toa::ArrivalDistribution d = toa::arrival_density(s, kern, 50.0);
    benchmark::DoNotOptimize(d.density.data());
  }
}
BENCHMARK(BM_arrival_kernel)->Unit(benchmark::kMillisecond);

void BM_wigner(benchmark::State& state) {
  const toa::MomentumState s = toa::make_gaussian_state(1.0, 0.05, 0.0, 1.0);
  for (auto _ : state) {
    const toa::WignerState w = toa::wigner_function(s);
    benchmark::DoNotOptimize(w.values.data());
  }
}
BENCHMARK(BM_wigner)->Unit(benchmark::kMillisecond);

void BM_record_spread(benchmark::State& state) {
  const toa::DetectorModel det = fd_gaussian_spread(7.0);
  for (auto _ : state) {
    const toa::RecordSpread rs = toa::record_spread(det, 2.0, 1.0);
    benchmark::DoNotOptimize(rs.u.data());
  }
}
BENCHMARK(BM_record_spread)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
