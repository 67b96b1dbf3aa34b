#include <benchmark/benchmark.h>

#include <limits>

#include "ppseq/chain_state.hpp"
#include "ppseq/generative.hpp"
#include "ppseq/gibbs.hpp"
#include "ppseq/model.hpp"
#include "ppseq/parallel.hpp"
#include "ppseq/split_merge.hpp"

using namespace ppseq;

namespace {

const WarpGrid kGrid = build_warp_grid(1, 1.0, 1.0);

// About 20 spikes per second on 100 neurons, half of them from two sequence
// types, so S grows linearly with the duration.
Hyperparams hyper(double duration) {
  Hyperparams h;
  h.num_neurons = 100;
  h.num_types = 2;
  h.duration = duration;
  h.event_rate = 0.2;
  h.amplitude_shape = 100.0;
  h.amplitude_rate = 2.0;
  h.width_dof = 10.0;
  h.width_scale = 0.04;
  h.delay_precision = 0.04;
  h.bg_shape = 1e6;
  h.bg_rate = 1e5;
  h.bg_concentration = 1e6;
  return h;
}

// Per-neuron background prior for the sampler; the generative one above pins
// the total rate instead.
Hyperparams inference(double duration) {
  Hyperparams h = hyper(duration);
  h.bg_shape = 1.0;
  h.bg_rate = 10.0;
  return h;
}

Simulation simulate_seconds(double duration) {
  Rng rng(1);
  return simulate(hyper(duration), kGrid, rng);
}

ChainState at_truth(const Simulation& sim, double window) {
  ChainState st(inference(sim.data.duration), kGrid, sim.params, sim.data.spikes, 0.0,
                sim.data.duration);
  st.assign_all(sim.truth.parents);
  st.set_neighbor_window(window);
  return st;
}

void report(benchmark::State& state, const Simulation& sim) {
  state.counters["spikes"] = static_cast<double>(sim.data.size());
  state.counters["spikes_per_s"] = benchmark::Counter(
      static_cast<double>(sim.data.size()) * state.iterations(), benchmark::Counter::kIsRate);
}

}  // namespace

// Full Gibbs sweep with every cluster offered to every spike; arg is seconds.
static void BM_ExactSweep(benchmark::State& state) {
  const auto sim = simulate_seconds(static_cast<double>(state.range(0)));
  ChainState st = at_truth(sim, std::numeric_limits<double>::infinity());
  Rng rng(2);
  for (auto _ : state) gibbs_sweep(st, rng);
  report(state, sim);
}
BENCHMARK(BM_ExactSweep)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_WindowedSweep(benchmark::State& state) {
  const auto sim = simulate_seconds(static_cast<double>(state.range(0)));
  ChainState st = at_truth(sim, 20.0);
  Rng rng(2);
  for (auto _ : state) gibbs_sweep(st, rng);
  report(state, sim);
}
BENCHMARK(BM_WindowedSweep)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_SplitMerge100(benchmark::State& state) {
  const auto sim = simulate_seconds(500.0);
  ChainState st = at_truth(sim, std::numeric_limits<double>::infinity());
  Rng rng(3);
  for (auto _ : state) split_merge_moves(st, 100, rng);
}
BENCHMARK(BM_SplitMerge100)->Unit(benchmark::kMillisecond);

// Sharded sweep at S around 1e5; arg is the shard count.
static void BM_ShardedSweep(benchmark::State& state) {
  const auto sim = simulate_seconds(5000.0);
  const auto shards = static_cast<int>(state.range(0));
  ShardedChain chain(inference(sim.data.duration), kGrid, sim.params, sim.data.spikes, shards, 4);
  for (int j = 0; j < shards; ++j) {
    std::vector<int> labels(chain.shard(j).num_spikes());
    for (std::size_t i = 0; i < labels.size(); ++i)
      labels[i] = sim.truth.parents[chain.source_index(j, i)];
    chain.shard(j).assign_all(labels);
  }
  chain.set_neighbor_window(20.0);
  Rng rng(5);
  for (auto _ : state) chain.sweep(rng);
  report(state, sim);
}
BENCHMARK(BM_ShardedSweep)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_LogLikelihood(benchmark::State& state) {
  const auto sim = simulate_seconds(1000.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(log_likelihood(sim.data, sim.truth.events, sim.params, kGrid));
  report(state, sim);
}
BENCHMARK(BM_LogLikelihood)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
