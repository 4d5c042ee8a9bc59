#include <benchmark/benchmark.h>

#include "bench_data.hpp"
#include "fsda/labels.hpp"

namespace {

void BM_Matvec(benchmark::State& state) {
  const auto x = bench_matrix(state.range(0), 4096, state.range(1));
  const std::vector<double> v(4096, 1.0);
  std::vector<double> y(static_cast<std::size_t>(x.rows()));
  for (auto _ : state) {
    fsda::matvec(x, v, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["nnz/s"] = benchmark::Counter(static_cast<double>(x.nnz()), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Matvec)->Args({10000, 20})->Args({10000, 40})->Args({50000, 40});

void BM_MatvecTranspose(benchmark::State& state) {
  const auto x = bench_matrix(state.range(0), 4096, state.range(1));
  const std::vector<double> w(static_cast<std::size_t>(x.rows()), 1.0);
  std::vector<double> y(4096);
  for (auto _ : state) {
    fsda::matvec_transpose(x, w, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["nnz/s"] = benchmark::Counter(static_cast<double>(x.nnz()), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_MatvecTranspose)->Args({10000, 20})->Args({10000, 40})->Args({50000, 40});

void BM_CenteredPair(benchmark::State& state) {
  const auto x = bench_matrix(state.range(0), 4096, 40);
  const fsda::LabelVector labels(bench_labels(x.rows(), 1));
  const auto c = fsda::labeled_mean(x, labels);
  const std::vector<double> v(4096, 0.5);
  std::vector<double> t(static_cast<std::size_t>(x.rows())), y(4096);
  for (auto _ : state) {
    fsda::centered_matvec(x, c, v, t);
    fsda::centered_matvec_transpose(x, c, t, y);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_CenteredPair)->Arg(10000)->Arg(50000);

}  // namespace

BENCHMARK_MAIN();
