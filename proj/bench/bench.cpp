// Serial reference kernels against their OpenMP counterparts.
//
//   ./snstf_bench --benchmark_filter=MonteCarlo

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "snstf/optimize.hpp"
#include "snstf/rng.hpp"
#include "snstf/sensing.hpp"
#include "snstf/simulate.hpp"

using namespace snstf;

namespace {

LinkModel desk_link() {
  LinkModel l;
  l.station_loss_db = 0.0;
  l.length_a_km = l.length_b_km = 10.0 / l.atten_db_per_km;
  return l;
}

TracePair burst_traces(double seconds) {
  const LinkGeometry geom{200.0, 2e5};
  TraceSimulation sim;
  sim.duration_s = seconds;
  sim.noise_rad = 1e-3;
  VibrationSource v;
  v.position_km = 30.0;
  v.waveform = DcPlusSinusoid{1.0, 1000.0, 0.5};
  v.start_s = 0.4 * seconds;
  v.duration_s = 0.2 * seconds;
  const std::vector<VibrationSource> src = {v};
  return simulate_phase_traces(geom, src, sim);
}

void MonteCarloSerial(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        serial::monte_carlo_session(desk_link(), DetectorModel{}, SourceParams{}, n, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void MonteCarloParallel(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(monte_carlo_session(desk_link(), DetectorModel{}, SourceParams{}, n, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void CorrelateSerial(benchmark::State& state) {
  const auto t = burst_traces(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::cross_correlate_delay(t.alice, t.bob, 1e-3));
}

void CorrelateParallel(benchmark::State& state) {
  const auto t = burst_traces(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cross_correlate_delay(t.alice, t.bob, 1e-3));
}

std::vector<double> tone(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2.0 * std::numbers::pi * 1000.0 * i / 200e3);
  return x;
}

void SpectrumSerial(benchmark::State& state) {
  const auto x = tone(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::dominant_frequency(x, 200e3, 500.0, 2000.0));
}

void SpectrumParallel(benchmark::State& state) {
  const auto x = tone(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dominant_frequency(x, 200e3, 500.0, 2000.0));
}

void ReferenceCounts(benchmark::State& state) {
  std::vector<double> phi(static_cast<std::size_t>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_reference_counts(phi, 1e4, 3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void Evaluate(benchmark::State& state) {
  const EvalSetup setup;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(SourceParams{}, setup));
}

}  // namespace

BENCHMARK(MonteCarloSerial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(MonteCarloParallel)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(CorrelateSerial)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(CorrelateParallel)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(SpectrumSerial)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(SpectrumParallel)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(ReferenceCounts)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(Evaluate)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
