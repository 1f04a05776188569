#include "sitrec/evaluation.hpp"
#include "sitrec/graph_builder.hpp"
#include "sitrec/spacetime.hpp"
#include "sitrec/ssl_solvers.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace sitrec;

namespace {

eval::SyntheticData blobs(int per_class) {
  eval::SyntheticSpec spec;
  spec.points_per_class = per_class;
  spec.novel_points = per_class;
  return eval::generate(spec);
}

void BM_CanGraph(benchmark::State& state) {
  const auto data = blobs(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(data.x, GraphKind::Can, 10));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(data.x.size()));
}
BENCHMARK(BM_CanGraph)->Arg(50)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_GaussianGraph(benchmark::State& state) {
  const auto data = blobs(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(data.x, GraphKind::Gaussian, 10));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(data.x.size()));
}
BENCHMARK(BM_GaussianGraph)->Arg(50)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void solve_bench(benchmark::State& state, Method m, std::size_t dense_limit) {
  const auto data = blobs(static_cast<int>(state.range(0)));
  const auto g = build_graph(data.x, GraphKind::Can, 10);
  const auto n = data.x.size();
  const auto y = build_indicator(data.labels, n);
  const auto u = build_fitting_weights(data.labels, n);
  SolverConfig cfg;
  cfg.method = m;
  cfg.dense_limit = dense_limit;
  int iterations = 0;
  for (auto _ : state) {
    const auto r = solve(g, y, u, cfg);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.f.data());
  }
  state.counters["n"] = static_cast<double>(n);
  state.counters["solves"] = iterations;
}

void BM_SolveGss(benchmark::State& s) { solve_bench(s, Method::GSS, 500); }
void BM_SolveL1(benchmark::State& s) { solve_bench(s, Method::L1, 500); }
void BM_SolveCapped(benchmark::State& s) { solve_bench(s, Method::Capped, 500); }
void BM_SolveGssSparse(benchmark::State& s) { solve_bench(s, Method::GSS, 0); }
void BM_SolveCappedSparse(benchmark::State& s) { solve_bench(s, Method::Capped, 0); }
BENCHMARK(BM_SolveGss)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveL1)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveCapped)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveGssSparse)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveCappedSparse)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_Aggregate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
  std::uniform_int_distribution<long long> ts(0, 40LL * 365 * 86400);
  std::uniform_int_distribution<int> label(0, 9);
  std::vector<int> labels(n);
  std::vector<std::optional<GeoTime>> meta(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = label(rng);
    meta[i] = GeoTime{lat(rng), lon(rng), ts(rng)};
  }
  for (auto _ : state) benchmark::DoNotOptimize(spacetime::aggregate(labels, meta));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_Aggregate)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
