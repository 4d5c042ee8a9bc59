#include <benchmark/benchmark.h>

#include <cmath>

#include "bench_data.hpp"
#include "fsda/krylov.hpp"
#include "fsda/sda.hpp"

namespace {

struct System {
  fsda::SparseMatrix x;
  std::vector<double> rhs;
};

const System& system() {
  static const System s = [] {
    System out{bench_matrix(50000, 4096, 40), {}};
    const auto l = bench_labels(50000);
    std::vector<double> z(l.begin(), l.end());
    out.rhs = fsda::matvec_transpose(out.x, z);
    return out;
  }();
  return s;
}

fsda::ShiftGrid grid(int n) {
  std::vector<double> b;
  for (int i = 0; i < n; ++i) b.push_back(1e-9 * std::pow(10.0, 11.0 * i / std::max(1, n - 1)));
  return fsda::ShiftGrid(std::move(b));
}

fsda::SolverOptions opts() {
  fsda::SolverOptions o;
  o.tol = 1e-3;
  return o;
}

void BM_ShiftedCg(benchmark::State& state) {
  const auto& s = system();
  const auto g = grid(static_cast<int>(state.range(0)));
  const auto op = fsda::gram_operator(s.x);
  for (auto _ : state) benchmark::DoNotOptimize(fsda::shifted_cg(op, s.rhs, g, opts()));
}
BENCHMARK(BM_ShiftedCg)->Arg(1)->Arg(4)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_RepeatedCg(benchmark::State& state) {
  const auto& s = system();
  const auto g = grid(static_cast<int>(state.range(0)));
  const auto gram = fsda::gram_operator(s.x);
  for (auto _ : state) {
    for (double beta : g.betas()) {
      const fsda::LinearOperator op(s.x.cols(), [&](std::span<const double> v, std::span<double> y) {
        gram.apply(v, y);
        fsda::axpy(beta, v, y);
      });
      benchmark::DoNotOptimize(fsda::cg(op, s.rhs, opts()));
    }
  }
}
BENCHMARK(BM_RepeatedCg)->Arg(1)->Arg(4)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
