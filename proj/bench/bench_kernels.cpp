// Serial reference kernels against their OpenMP variants.

#include "adjointkit/generators.hpp"
#include "adjointkit/kernels.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace adjointkit;

namespace {

template <auto Kernel>
void BM_KronSum(benchmark::State& state) {
  Lcg rng(42);
  const Matrix a = rng.uniform_matrix(state.range(0), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a));
}

template <auto Kernel>
void BM_AdjointDefects(benchmark::State& state) {
  Lcg rng(42);
  const Index n = state.range(0);
  const Matrix a = rng.uniform_matrix(n, n);
  const Matrix m = gen::spd_matrix(rng, n);
  const Matrix a_star = m.llt().solve(a.transpose() * m);
  const Matrix u = rng.uniform_matrix(n, 256);
  const Matrix v = rng.uniform_matrix(n, 256);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, a_star, m, m, u, v));
}

template <auto Kernel>
void BM_CentralGradient(benchmark::State& state) {
  Lcg rng(42);
  const Index n = state.range(0);
  const Matrix a = rng.uniform_matrix(n, n);
  const auto f = [&a](const Vector& z) { return (a * z).array().tanh().matrix().squaredNorm(); };
  const Vector z = rng.uniform_vector(n);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(f, z, 1e-6));
}

}  // namespace

BENCHMARK(BM_KronSum<kernels::serial::kron_sum_transpose>)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_KronSum<kernels::omp::kron_sum_transpose>)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_AdjointDefects<kernels::serial::adjoint_defects>)->Arg(16)->Arg(64);
BENCHMARK(BM_AdjointDefects<kernels::omp::adjoint_defects>)->Arg(16)->Arg(64);
BENCHMARK(BM_CentralGradient<kernels::serial::central_gradient>)->Arg(64)->Arg(256);
BENCHMARK(BM_CentralGradient<kernels::omp::central_gradient>)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
