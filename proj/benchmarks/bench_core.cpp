#include <benchmark/benchmark.h>

#include <cmath>

#include "pq/experiments.hpp"
#include "pq/model.hpp"
#include "pq/newton.hpp"
#include "pq/signal.hpp"
#include "pq/tls.hpp"

using namespace pq;

static void BM_TlsPropagate(benchmark::State& state) {
  const TlsHamiltonian H{Basis::modes, 0.04, DriveWaveform::harmonic(0.1, 0.25, 0.014), Gauge::as_written};
  const auto steps = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto end = propagate(EnvelopeState{0.0, 1.0, Basis::modes}, H, 0.0, 0.01 * steps, 0.01,
                         [](double, const EnvelopeState&) {});
    benchmark::DoNotOptimize(end);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TlsPropagate)->Arg(100000);

static void BM_NonlinearRhs(benchmark::State& state) {
  const ApparatusParams p;
  NewtonState s{0.01, -0.004, 0.0, 0.0, Frame::lab};
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nonlinear_rhs(s, t, p));
    t += 1e-3;
  }
}
BENCHMARK(BM_NonlinearRhs);

static void BM_LinearNewtonIntegrate(benchmark::State& state) {
  const double w1 = 3.36, w2 = 3.28;
  auto rhs = [&](const NewtonState& s, double t) { return linear_rhs(s, 0.1 + 0.2 * std::cos(0.014 * t), w1, w2); };
  for (auto _ : state) {
    auto tr = integrate(rhs, NewtonState{0.01, -0.01, 0, 0, Frame::quasistatic_relative}, 0.0, 100.0, 0.01);
    benchmark::DoNotOptimize(tr.samples.back());
  }
}
BENCHMARK(BM_LinearNewtonIntegrate);

static void BM_GaussianLowpass(benchmark::State& state) {
  TimeSeries s{0.0, 0.01, std::vector<double>(static_cast<std::size_t>(state.range(0)))};
  for (std::size_t i = 0; i < s.size(); ++i) s.values[i] = std::cos(3.3 * 0.01 * static_cast<double>(i));
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_lowpass(s, 3.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GaussianLowpass)->Arg(1 << 16)->Arg(1 << 20);

static void BM_Husimi(benchmark::State& state) {
  TimeSeries s{0.0, 0.05, std::vector<double>(40000)};
  for (std::size_t i = 0; i < s.size(); ++i) s.values[i] = std::cos(3.3 * 0.05 * static_cast<double>(i));
  const auto omega = linspace(3.0, 3.6, 121);
  const auto t = linspace(100.0, 1900.0, 101);
  for (auto _ : state) benchmark::DoNotOptimize(husimi(s, 50.0, omega, t));
}
BENCHMARK(BM_Husimi)->Unit(benchmark::kMillisecond);

static void BM_EffectiveTlsParams(benchmark::State& state) {
  const ApparatusParams p;
  for (auto _ : state) benchmark::DoNotOptimize(effective_tls_params(p));
}
BENCHMARK(BM_EffectiveTlsParams);

static void BM_FanCellSchrodinger(benchmark::State& state) {
  const ApparatusParams ap;
  FanSettings s;
  for (auto _ : state) benchmark::DoNotOptimize(run_lzsm_fan(ap, s, {0.3}, {0.5}, 1));
}
BENCHMARK(BM_FanCellSchrodinger)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
