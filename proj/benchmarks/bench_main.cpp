#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "bohrlab/fourier.hpp"
#include "bohrlab/martingale.hpp"
#include "bohrlab/rng.hpp"
#include "bohrlab/sampler.hpp"
#include "bohrlab/sidon.hpp"

using namespace bohrlab;

static void BM_SamplePoisson(benchmark::State& state) {
  const auto w = WeightSequence::make(Harmonic{2.0}, state.range(0));
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_poisson(w, seed_stream(1, i++)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SamplePoisson)->Arg(10'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

static void BM_FindRelationExhaustive(benchmark::State& state) {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<std::int64_t> pick(1, std::int64_t{1} << 40);
  std::set<std::int64_t> s;
  while (s.size() < static_cast<std::size_t>(state.range(0))) s.insert(pick(gen));
  const std::vector<std::int64_t> v(s.begin(), s.end());
  for (auto _ : state) benchmark::DoNotOptimize(find_relation(v, v.size()));
}
BENCHMARK(BM_FindRelationExhaustive)->DenseRange(12, 24, 4)->Unit(benchmark::kMillisecond);

static void BM_ScanRelationsSample(benchmark::State& state) {
  const auto w = WeightSequence::make(Harmonic{4.0}, 1'000'000);
  const auto v = sample_poisson(w, 3).elements();
  for (auto _ : state) benchmark::DoNotOptimize(scan_relations(v));
  state.counters["elements"] = static_cast<double>(v.size());
}
BENCHMARK(BM_ScanRelationsSample)->Unit(benchmark::kMillisecond);

static void BM_PmNorm(benchmark::State& state) {
  AtomicMeasure m;
  std::vector<double> phase;
  for (std::int64_t n = 1; n <= state.range(0); ++n) {
    m.atoms[n] = 1.0 / static_cast<double>(n);
    phase.push_back(2.0 * std::cos(2 * std::numbers::pi * 3.0 * static_cast<double>(n) / static_cast<double>(state.range(0))));
  }
  for (auto _ : state) benchmark::DoNotOptimize(pm_norm_estimate(m, phase));
}
BENCHMARK(BM_PmNorm)->Arg(1 << 10)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

static void BM_MartingaleTrace(benchmark::State& state) {
  const MartingaleParams p;
  const std::int64_t N = state.range(0);
  const MartingaleEvaluator eval(p, {N});
  const auto w = WeightSequence::make(Harmonic{p.alpha}, N);
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(eval.trace(sample_poisson(w, seed_stream(2, i++))));
}
BENCHMARK(BM_MartingaleTrace)->Arg(200)->Arg(2000)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
