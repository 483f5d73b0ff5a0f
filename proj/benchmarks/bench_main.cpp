#include <benchmark/benchmark.h>

#include "schatten_qp/channels.hpp"
#include "schatten_qp/entropy.hpp"
#include "schatten_qp/linalg.hpp"
#include "schatten_qp/qnorm.hpp"
#include "schatten_qp/random.hpp"

namespace {

using namespace sqp;

void BM_SchattenNorm(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(1);
  const Matrix x = gaussian_matrix(d, d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(schatten_norm(x, 0.5));
}
BENCHMARK(BM_SchattenNorm)->Arg(4)->Arg(16)->Arg(64);

// Sup-type (q > p) and inf-type (q < p) on the same operator; range(0) is the second factor.
void BM_TwoIndexNorm(benchmark::State& state) {
  const int d2 = static_cast<int>(state.range(0));
  const bool sup = state.range(1) != 0;
  const BipartiteOperator x = random_bipartite_psd(2, d2, 2 * d2, 7);
  const IndexPair idx = sup ? IndexPair{2, 1} : IndexPair{0.5, 1};
  for (auto _ : state) benchmark::DoNotOptimize(two_index_norm(x, idx).value);
}
BENCHMARK(BM_TwoIndexNorm)->ArgsProduct({{2, 3, 4}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_ConditionalEntropy(benchmark::State& state) {
  const int db = static_cast<int>(state.range(0));
  const State rho(random_density(2 * db, 11), {2, db});
  const bool direct = state.range(1) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(direct ? conditional_entropy_direct(rho, 0.75).value
                                    : conditional_entropy_norm(rho, 0.75).value);
}
BENCHMARK(BM_ConditionalEntropy)->ArgsProduct({{2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_CbNormReplacer(benchmark::State& state) {
  const CPMap phi = replacer_channel(2);
  const int e_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cb_norm_estimate(phi, 0.5, 0.5, e_max).value);
}
BENCHMARK(BM_CbNormReplacer)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
