#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "dnsasm/approx_match.hpp"
#include "dnsasm/baseline_ar.hpp"
#include "dnsasm/detector.hpp"
#include "dnsasm/evalharness.hpp"
#include "dnsasm/synth.hpp"

using namespace dnsasm;

namespace {

const SeriesMap& synth_series() {
  static const SeriesMap s = [] {
    SynthProfile p = SynthProfile::default_profile(4);
    return generate_series(p);
  }();
  return s;
}

const MinuteSeries& series_a() {
  return synth_series().at(SeriesKey(FeatureKind::total_packets, std::nullopt));
}

std::vector<double> noisy_counts(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = 100.0 + 30.0 * std::sin(static_cast<double>(i) * 2.0 * M_PI / 1440.0) +
           static_cast<double>(rng() % 9);
  }
  return v;
}

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_DetectSeries(benchmark::State& state) {
  const Execution exec = exec_of(state);
  const MinuteSeries& a = series_a();
  DetectorConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(detect_series(a, cfg, exec));
  state.SetLabel(exec == Execution::serial ? "serial" : "parallel");
}
BENCHMARK(BM_DetectSeries)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DetectSeriesAr(benchmark::State& state) {
  const Execution exec = exec_of(state);
  const MinuteSeries& a = series_a();
  DetectorConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(detect_series_ar(a, cfg, exec));
  state.SetLabel(exec == Execution::serial ? "serial" : "parallel");
}
BENCHMARK(BM_DetectSeriesAr)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  const Execution exec = exec_of(state);
  SweepConfig cfg;
  cfg.lookbacks = {360, 1440};
  const SynthProfile p = SynthProfile::default_profile(4);
  const auto truth = ground_truth(p);
  const SeriesMap& series = synth_series();
  for (auto _ : state) benchmark::DoNotOptimize(sweep(series, truth, cfg, exec));
  state.SetLabel(exec == Execution::serial ? "serial" : "parallel");
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Search(benchmark::State& state) {
  const auto text = noisy_counts(static_cast<std::size_t>(state.range(0)), 1);
  const std::vector<double> pattern(text.begin() + 500, text.begin() + 560);
  const Tolerance tol(6.0, 150.0);
  for (auto _ : state) benchmark::DoNotOptimize(dnsasm::search(text, pattern, tol));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Search)->RangeMultiplier(10)->Range(10000, 1000000)->Complexity(benchmark::oN);

// Sliding the pattern one minute: a fresh prefix table versus one incremental step.
void BM_PrefixFresh(benchmark::State& state) {
  const auto v = noisy_counts(100000, 2);
  const auto k = static_cast<std::size_t>(state.range(0));
  std::size_t pos = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(prefix_function(std::span<const double>(v).subspan(pos, k), 6.0));
    pos = (pos + 1) % (v.size() - k);
  }
}
BENCHMARK(BM_PrefixFresh)->Arg(10)->Arg(60)->Arg(600);

void BM_IncrementalAdvance(benchmark::State& state) {
  const auto v = noisy_counts(100000, 2);
  const auto k = static_cast<std::size_t>(state.range(0));
  IncrementalMatcher m(std::span<const double>(v).first(k), Tolerance(6.0, 150.0));
  std::size_t pos = k;
  for (auto _ : state) {
    m.advance(v[pos]);
    pos = pos + 1 < v.size() ? pos + 1 : k;
  }
}
BENCHMARK(BM_IncrementalAdvance)->Arg(10)->Arg(60)->Arg(600);

}  // namespace

BENCHMARK_MAIN();
