#include <uwmmse/model.hpp>
#include <uwmmse/netgen.hpp>
#include <uwmmse/train.hpp>
#include <uwmmse/wmmse.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace uwmmse;

ChannelState make_channel(int m) {
  const auto topo = sample_topology(m, 11);
  return channel_state(topo, sample_fading(m, 12), 12);
}

ProblemConfig low_noise() {
  ProblemConfig c;
  c.noise_std = 2.6e-5;
  return c;
}

void BM_Forward(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const ChannelState h = make_channel(m);
  const Mat q = model::default_features(m);
  const auto theta = model::init_params(1, 4, 1, 4);
  const ProblemConfig cfg = low_noise();
  for (auto _ : state) benchmark::DoNotOptimize(model::forward(h, q, theta, cfg).p.data());
}
BENCHMARK(BM_Forward)->Arg(10)->Arg(20)->Arg(30);

void BM_WmmseSolve(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const ChannelState h = make_channel(m);
  wmmse::SolveOptions o;
  o.noise_std = 2.6e-5;
  for (auto _ : state) benchmark::DoNotOptimize(wmmse::solve(h, o).p.data());
}
BENCHMARK(BM_WmmseSolve)->Arg(10)->Arg(20)->Arg(30);

void BM_LossAndGradient(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::vector<train::Sample> batch;
  for (int k = 0; k < 8; ++k) {
    const auto topo = sample_topology(m, 11);
    batch.push_back({channel_state(topo, sample_fading(m, 100 + k)), model::default_features(m)});
  }
  const auto theta = model::init_params(1, 4, 1, 4);
  const ProblemConfig cfg = low_noise();
  for (auto _ : state) benchmark::DoNotOptimize(train::batch_loss_and_gradient(theta, batch, cfg).loss);
}
BENCHMARK(BM_LossAndGradient)->Arg(10)->Arg(20);

}  // namespace
BENCHMARK_MAIN();
