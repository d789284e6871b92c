#include <benchmark/benchmark.h>

#include <random>

#include "citemetrics/cohort.hpp"
#include "citemetrics/metrics.hpp"
#include "citemetrics/random.hpp"
#include "citemetrics/stats.hpp"
#include "citemetrics/synth.hpp"

using namespace citemetrics;

namespace {

const CitationGraph& bench_graph() {
  static const CitationGraph graph = [] {
    GenConfig cfg;
    cfg.year_begin = 1960;
    cfg.year_end = 1999;
    cfg.initial_per_year = 250;
    cfg.growth = 0.05;
    cfg.refs_mean = 8;
    cfg.refs_spread = 3;
    cfg.attachment_mix = 0.5;
    cfg.copy_prob = 0.2;
    cfg.seed = 1;
    return generate(cfg).graph;
  }();
  return graph;
}

}  // namespace

static void BM_Disruption(benchmark::State& state) {
  const auto& g = bench_graph();
  const TimeWindow w{1, 5};
  PaperIndex p = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(disruption(g, p, w));
    p = (p + 1) % static_cast<PaperIndex>(g.node_count());
  }
}
BENCHMARK(BM_Disruption);

static void BM_ReferenceDiversity(benchmark::State& state) {
  const auto& g = bench_graph();
  PaperIndex p = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference_diversity(g, p));
    p = (p + 1) % static_cast<PaperIndex>(g.node_count());
  }
}
BENCHMARK(BM_ReferenceDiversity);

static void BM_MetricTable(benchmark::State& state) {
  const auto& g = bench_graph();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        compute_metric_table(g, {1, 5}, {}, static_cast<unsigned>(state.range(0))));
  }
}
BENCHMARK(BM_MetricTable)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_Correlation(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(uniform_index(rng, 50));
    y[i] = uniform_unit(rng);
  }
  const auto method = static_cast<CorrelationMethod>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(correlation(x, y, method));
  }
}
BENCHMARK(BM_Correlation)
    ->Args({10000, 0})
    ->Args({10000, 1})
    ->Args({10000, 2})
    ->Unit(benchmark::kMicrosecond);

static void BM_YearlySeries(benchmark::State& state) {
  const auto table = compute_metric_table(bench_graph(), {1, 5});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        yearly_correlation_series(table, CorrelationMethod::pearson, 30));
  }
}
BENCHMARK(BM_YearlySeries)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
