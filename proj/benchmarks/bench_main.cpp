#include <benchmark/benchmark.h>

#include <cstdint>

#include "mkmimo/asymptotics.hpp"
#include "mkmimo/capacity.hpp"
#include "mkmimo/channel_sampler.hpp"
#include "mkmimo/corr_measure.hpp"
#include "mkmimo/corr_models.hpp"

namespace {

using namespace mkmimo;

ChannelSpec spec_for(Eigen::Index n, Eigen::Index m) {
  const CorrelationMatrix corr = make_corr(CorrKind::exponential, n, 0.5);
  return make_shared_corr_spec(n, n, KeyholeGains::equal(m), corr, corr, 10.0);
}

void bm_keyhole_sample(benchmark::State& state) {
  const ChannelSpec spec = spec_for(state.range(0), state.range(1));
  const KeyholeSampler sampler(spec);
  std::uint64_t trial = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(1, trial++));
}
BENCHMARK(bm_keyhole_sample)->Args({2, 2})->Args({8, 4})->Args({32, 2})->Args({8, 256});

void bm_wishart_sample(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::MatrixXcd root = psd_sqrt(make_corr(CorrKind::exponential, n, 0.5)).root;
  std::uint64_t trial = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_keyhole_wishart(n, n, state.range(1), root, root, 1, trial++));
  }
}
BENCHMARK(bm_wishart_sample)->Args({8, 256})->Args({32, 4096});

void bm_factored_capacity(benchmark::State& state) {
  const ChannelSpec spec = spec_for(state.range(0), state.range(1));
  const KeyholeSampler sampler(spec);
  const KeyholeSampler::Factors f = sampler.sample_factors(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(keyhole_capacity_factored(f.h_t, f.h_r, spec.gains, spec.snr));
  }
}
BENCHMARK(bm_factored_capacity)->Args({8, 4})->Args({32, 2})->Args({32, 16});

void bm_monte_carlo_batch(benchmark::State& state) {
  const ChannelSpec spec = spec_for(4, 2);
  const std::uint64_t trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_capacity(spec, trials, 1));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(bm_monte_carlo_batch)->Arg(1000)->Arg(10000);

void bm_moment_formulas(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const CorrelationMatrix corr = make_corr(CorrKind::exponential, n, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(frmk_moments(corr, corr, 10.0, n, n, Regime::exact));
  }
}
BENCHMARK(bm_moment_formulas)->Arg(8)->Arg(64);

void bm_decompose(benchmark::State& state) {
  const CorrelationMatrix corr =
      make_corr(CorrKind::exponential, state.range(0), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(corr));
}
BENCHMARK(bm_decompose)->Arg(8)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
