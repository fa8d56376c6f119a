// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "lskl/kernels.hpp"
#include "lskl/priors.hpp"
#include "lskl/selection.hpp"

namespace {

using namespace lskl;

const ModelInstance kF1 = ModelInstance::log_normal(0.0, 1.0);
const ModelInstance kF2 = ModelInstance::weibull(1.6, 1.0);

void BM_LogRatioDrawsSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::log_ratio_draws_serial(kF1, kF2, n, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LogRatioDrawsParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::log_ratio_draws_parallel(kF1, kF2, n, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LogLikelihoodSerial(benchmark::State& state) {
  const Dataset d = sample(kF1, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::log_likelihood_serial(d.values, kF2));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LogLikelihoodParallel(benchmark::State& state) {
  const Dataset d = sample(kF1, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::log_likelihood_parallel(d.values, kF2));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LogMarginalGrid(benchmark::State& state) {
  const Dataset d = sample(kF1, 250, 3);
  const ParameterPrior prior = data_centred_prior(Family::kWeibull, d);
  for (auto _ : state) benchmark::DoNotOptimize(log_marginal_likelihood(prior, d));
}

}  // namespace

BENCHMARK(BM_LogRatioDrawsSerial)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogRatioDrawsParallel)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogLikelihoodSerial)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogLikelihoodParallel)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogMarginalGrid)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
