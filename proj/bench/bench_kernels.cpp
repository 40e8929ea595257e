#include <benchmark/benchmark.h>

#include "rmest/estimators.hpp"
#include "rmest/kernels.hpp"
#include "rmest/sampling.hpp"

using namespace rmest;

namespace {

Dataset dataset(Index dim, Index n) {
  return sample_clean(CovarianceModel::toeplitz(dim, 0.9), n, 1);
}

template <kernels::Policy P>
void quadratic_forms(benchmark::State& state) {
  const Index dim = state.range(0);
  const Dataset data = dataset(dim, state.range(1));
  const Matrix lower = rscm(data, 0.3).llt().matrixL();
  RealVector out;
  for (auto _ : state) {
    kernels::quadratic_forms(P, lower, data.samples, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <kernels::Policy P>
void weighted_gram(benchmark::State& state) {
  const Dataset data = dataset(state.range(0), state.range(1));
  const RealVector w = RealVector::Ones(data.size());
  Matrix out;
  for (auto _ : state) {
    kernels::weighted_gram(P, data.samples, w, 0.01, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <kernels::Policy P>
void regularized_solve(benchmark::State& state) {
  const Dataset data = dataset(state.range(0), state.range(1));
  SolverOptions opts;
  opts.policy = P;
  opts.max_iterations = 1000;
  const auto w = WeightFunction::tyler(static_cast<double>(data.size()) / data.dimension(), 0.1);
  for (auto _ : state) {
    const EstimatorResult r = regularized_maronna(data, w, 0.3, opts);
    benchmark::DoNotOptimize(r.estimate.data());
    state.counters["iterations"] = r.iterations;
  }
}

void sizes(benchmark::internal::Benchmark* b) {
  b->Args({50, 200})->Args({150, 100})->Args({300, 400})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(quadratic_forms<kernels::Policy::Serial>)->Apply(sizes);
BENCHMARK(quadratic_forms<kernels::Policy::Parallel>)->Apply(sizes);
BENCHMARK(weighted_gram<kernels::Policy::Serial>)->Apply(sizes);
BENCHMARK(weighted_gram<kernels::Policy::Parallel>)->Apply(sizes);
BENCHMARK(regularized_solve<kernels::Policy::Serial>)->Apply(sizes);
BENCHMARK(regularized_solve<kernels::Policy::Parallel>)->Apply(sizes);

BENCHMARK_MAIN();
