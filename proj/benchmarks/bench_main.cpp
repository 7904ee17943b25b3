#include <benchmark/benchmark.h>

#include "jcs/agler.hpp"
#include "jcs/dilation.hpp"
#include "jcs/lattice.hpp"
#include "jcs/realize.hpp"
#include "jcs/transfer.hpp"

using namespace jcs;

namespace {

MultiparametricSystem bench_system(int n) {
  return random_jconservative(n, 3, 2, 11, CanonicalSymmetry::standard(2, 1));
}

void BM_TaylorRecursive(benchmark::State& state) {
  const auto sys = bench_system(static_cast<int>(state.range(0)));
  const int d = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(taylor_coefficients(sys, d, TaylorMethod::recursive));
}
BENCHMARK(BM_TaylorRecursive)->Args({1, 16})->Args({2, 12})->Args({3, 8});

void BM_TaylorWords(benchmark::State& state) {
  const auto sys = bench_system(static_cast<int>(state.range(0)));
  const int d = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(taylor_coefficients(sys, d, TaylorMethod::words));
}
BENCHMARK(BM_TaylorWords)->Args({2, 6})->Args({3, 5});

void BM_EvalTransfer(benchmark::State& state) {
  const auto sys = bench_system(3);
  Rng rng(1);
  const Point z = rng.polydisk_point(3, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(eval_transfer(sys, z));
}
BENCHMARK(BM_EvalTransfer);

void BM_Simulate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int levels = static_cast<int>(state.range(1));
  const auto sys = bench_system(n);
  Rng rng(2);
  LatticeSignal x0(n, sys.dx());
  x0.set(MultiIndex(n, 0), rng.complex_vector(sys.dx()));
  LatticeSignal u(n, sys.du());
  u.set(MultiIndex(n, 0), rng.complex_vector(sys.du()));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(sys, x0, u, levels));
}
BENCHMARK(BM_Simulate)->Args({1, 200})->Args({2, 40})->Args({3, 16});

void BM_PencilDecomposition(benchmark::State& state) {
  const auto g = system_operators(matrix_unit_example());
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(construct_pencil_decomposition(g, 2.0, d));
}
BENCHMARK(BM_PencilDecomposition)->Arg(12)->Arg(24);

void BM_KernelCheck(benchmark::State& state) {
  const auto g = system_operators(hyperbolic_example());
  const auto dec = construct_pencil_decomposition(g, 2.0, 12);
  Rng rng(3);
  const auto pairs = random_pairs(1, 200, 0.5, rng);
  for (auto _ : state) benchmark::DoNotOptimize(verify_kernel_identity(g, dec, pairs));
}
BENCHMARK(BM_KernelCheck);

void BM_Dilation(benchmark::State& state) {
  const auto sys = state.range(0) == 0 ? hyperbolic_example() : matrix_unit_example();
  const auto dec = construct_pencil_decomposition(system_operators(sys), 2.0, static_cast<int>(state.range(1)));
  DilationOptions opt;
  opt.throw_on_failure = false;
  for (auto _ : state) benchmark::DoNotOptimize(build_dilation(sys, dec, opt));
}
BENCHMARK(BM_Dilation)->Args({0, 12})->Args({0, 24})->Args({1, 12})->Unit(benchmark::kMillisecond);

void BM_Realization(benchmark::State& state) {
  TruncatedOperatorSeries theta(2, 2, 1, 1);
  theta.set({1, 1}, Mat::Ones(1, 1));
  RealizationOptions opt;
  opt.decomposition_degree = static_cast<int>(state.range(0));
  opt.throw_on_failure = false;
  for (auto _ : state) benchmark::DoNotOptimize(jconservative_realization(theta, 2, opt));
}
BENCHMARK(BM_Realization)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
