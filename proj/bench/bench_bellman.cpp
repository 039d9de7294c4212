// Serial reference vs. OpenMP robust Bellman sweep.
//
//   ./bench_bellman --benchmark_filter=Chi2
//
// Threads come from OMP_NUM_THREADS; with one thread the two should tie.

#include <benchmark/benchmark.h>

#include "robust_mdp/mdp.hpp"
#include "robust_mdp/robust_bellman.hpp"

namespace {

using namespace robust_mdp;

template <bool Parallel>
void sweep(benchmark::State& state, Divergence div) {
  const auto S = static_cast<std::size_t>(state.range(0));
  const TabularMDP m = make_random_mdp(S, 4, 0.9, 7);
  const UncertaintySpec u{div, 0.2};
  QFunction q(m.num_pairs());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = static_cast<double>(k % 17) * 0.3;
  for (auto _ : state) {
    QFunction out = Parallel ? robust_bellman_apply(m, u, q) : robust_bellman_apply_serial(m, u, q);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.num_pairs() * S));
}

void BM_TvSerial(benchmark::State& s) { sweep<false>(s, Divergence::TV); }
void BM_TvParallel(benchmark::State& s) { sweep<true>(s, Divergence::TV); }
void BM_Chi2Serial(benchmark::State& s) { sweep<false>(s, Divergence::Chi2); }
void BM_Chi2Parallel(benchmark::State& s) { sweep<true>(s, Divergence::Chi2); }

}  // namespace

BENCHMARK(BM_TvSerial)->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_TvParallel)->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_Chi2Serial)->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_Chi2Parallel)->RangeMultiplier(4)->Range(16, 1024);

BENCHMARK_MAIN();
