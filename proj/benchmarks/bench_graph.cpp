#include <benchmark/benchmark.h>

#include "bench_data.hpp"
#include "fsda/graph.hpp"

namespace {

void BM_KnnInvertedIndex(benchmark::State& state) {
  const auto x = bench_matrix(state.range(0), 2048, 30);
  for (auto _ : state) benchmark::DoNotOptimize(fsda::knn_graph(x, 5, fsda::NeighborSearch::inverted_index));
}
BENCHMARK(BM_KnnInvertedIndex)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_KnnBruteForce(benchmark::State& state) {
  const auto x = bench_matrix(state.range(0), 2048, 30);
  for (auto _ : state) benchmark::DoNotOptimize(fsda::knn_graph(x, 5, fsda::NeighborSearch::brute_force));
}
BENCHMARK(BM_KnnBruteForce)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Threshold(benchmark::State& state) {
  const auto x = bench_matrix(4000, 2048, 30);
  for (auto _ : state) benchmark::DoNotOptimize(fsda::threshold_graph(x, 0.4));
}
BENCHMARK(BM_Threshold)->Unit(benchmark::kMillisecond);

void BM_Laplacian(benchmark::State& state) {
  const auto g = fsda::knn_graph(bench_matrix(4000, 2048, 30), 5);
  for (auto _ : state) benchmark::DoNotOptimize(fsda::laplacian(g));
}
BENCHMARK(BM_Laplacian)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
