#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "cdklab/kernel.hpp"
#include "cdklab/perturbation.hpp"
#include "cdklab/stieltjes.hpp"

using namespace cdklab;

namespace {

// Recurrence throughput: the building block every kernel evaluation reduces to.
void BM_recur_real(benchmark::State& state) {
  const JacobiParameters params = catalog(Catalog::Free);
  const std::size_t n = std::size_t(state.range(0));
  for (auto _ : state) {
    double sum = 0.0;
    recur_pq(params, 0.1234, n, [&](std::size_t, double p, double) { sum += p * p; });
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(n));
}
BENCHMARK(BM_recur_real)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);

void BM_recur_complex(benchmark::State& state) {
  const JacobiParameters params = catalog(Catalog::Free);
  const std::size_t n = std::size_t(state.range(0));
  const Complex z(0.1234, 1e-4);
  for (auto _ : state) {
    Complex sum = 0.0;
    recur_pq(params, z, n, [&](std::size_t, Complex p, Complex) { sum += p * p; });
    benchmark::DoNotOptimize(sum);
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(n));
}
BENCHMARK(BM_recur_complex)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);

// Sum vs closed-form route for the same kernel value at well-separated points.
void BM_kernel_sum(benchmark::State& state) {
  const JacobiParameters params = catalog(Catalog::Chebyshev1);
  const std::size_t n = std::size_t(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cd_kernel(params, Complex(0.1), Complex(0.2), n, KernelMethod::Sum));
  }
}
BENCHMARK(BM_kernel_sum)->Arg(1 << 12)->Arg(1 << 16);

void BM_kernel_cd_formula(benchmark::State& state) {
  const JacobiParameters params = catalog(Catalog::Chebyshev1);
  const std::size_t n = std::size_t(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cd_kernel(params, Complex(0.1), Complex(0.2), n, KernelMethod::CdFormula));
  }
}
BENCHMARK(BM_kernel_cd_formula)->Arg(1 << 12)->Arg(1 << 16);

// Continued-fraction descent cost as the non-constant head grows.
void BM_stieltjes_long_head(benchmark::State& state) {
  const std::size_t depth = std::size_t(state.range(0));
  std::vector<double> head_a(depth, 0.5), head_b(depth);
  for (std::size_t k = 0; k < depth; ++k) head_b[k] = 0.25 / double((k + 1) * (k + 1));
  const JacobiParameters params(head_a, head_b, 0.5, 0.0);
  const Complex z(0.3, 1e-6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stieltjes_F(params, z));
  }
}
BENCHMARK(BM_stieltjes_long_head)->Arg(1 << 8)->Arg(1 << 12)->Arg(1 << 16);

void BM_boundary_F(benchmark::State& state) {
  const JacobiParameters params = catalog(Catalog::Free);
  for (auto _ : state) {
    benchmark::DoNotOptimize(boundary_F(params, 0.3));
  }
}
BENCHMARK(BM_boundary_F);

void BM_transfer_average(benchmark::State& state) {
  const JacobiParameters params =
      apply(catalog(Catalog::Free), RankOne{0.5});
  const std::size_t n = std::size_t(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(transfer_average(params, 0.0, Complex(1.0), n));
  }
}
BENCHMARK(BM_transfer_average)->Arg(1 << 12)->Arg(1 << 16);

}  // namespace

BENCHMARK_MAIN();
