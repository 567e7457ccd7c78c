#include <benchmark/benchmark.h>

#include "loopbraid/chain.hpp"
#include "loopbraid/relations.hpp"

using namespace loopbraid;

namespace {

DenseOperator chain_operator(int n) {
  Matrix m(std::size_t{1} << n, std::size_t{1} << n);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = CScalar(std::sin(0.1 * i + 0.3 * j), std::cos(0.7 * i - j));
  return DenseOperator(m);
}

}  // namespace

static void BM_ApplyPair(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto r = build_R(RMatrixSpec::rational(1.0), 0.3);
  const auto m = chain_operator(n);
  for (auto _ : state) benchmark::DoNotOptimize(apply_pair(r, n, 1, m));
}
BENCHMARK(BM_ApplyPair)->DenseRange(4, 9);

static void BM_EmbedThenMultiply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto r = build_R(RMatrixSpec::rational(1.0), 0.3);
  const auto m = chain_operator(n);
  for (auto _ : state) benchmark::DoNotOptimize(embed_pair(r, n, 1, n) * m);
}
BENCHMARK(BM_EmbedThenMultiply)->DenseRange(4, 9);

static void BM_Monodromy(benchmark::State& state) {
  const auto spec = RMatrixSpec::a3_integrable({0.4, bchoice::ZZHalf{}});
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(monodromy(spec, {0.3, 0.1}, n));
}
BENCHMARK(BM_Monodromy)->DenseRange(3, 8);

static void BM_TransferCommutator(benchmark::State& state) {
  const auto spec = RMatrixSpec::rational(1.0);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(transfer_commutator(spec, 0.3, -0.2, n));
}
BENCHMARK(BM_TransferCommutator)->DenseRange(3, 7);

static void BM_Classify(benchmark::State& state) {
  const GeneratorFamily fam({0.6, bchoice::ZZHalf{}}, ChainGeometry(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(classify(fam));
}
BENCHMARK(BM_Classify)->DenseRange(4, 7);

static void BM_Charges(benchmark::State& state) {
  const auto spec = RMatrixSpec::rational(1.0);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(extract_charges(spec, 0.5, n));
}
BENCHMARK(BM_Charges)->DenseRange(3, 6);

BENCHMARK_MAIN();
