// Engine criteria: sweep cost and scaling, and the sharded parallel sampler.

#include <algorithm>
#include <thread>

#include "acceptance/common.hpp"
#include "oracles/oracles.hpp"
#include "ppseq/chain_state.hpp"
#include "ppseq/generative.hpp"
#include "ppseq/gibbs.hpp"
#include "ppseq/parallel.hpp"
#include "ppseq/split_merge.hpp"

using namespace ppseq;

namespace acceptance {

namespace {

// 100 neurons, two sequence types, about 20 spikes per second split evenly
// between background and sequences.
Hyperparams dense_hyper(double duration) {
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

Hyperparams inference_hyper(const Hyperparams& truth) {
  Hyperparams h = truth;
  h.bg_shape = 1.0;
  h.bg_rate = 10.0;
  return h;
}

const WarpGrid kNoWarp = build_warp_grid(1, 1.0, 1.0);

// Chain state started from the true partition, so sweeps pay for a realistic
// number of clusters.
ChainState state_at_truth(const Simulation& sim, const Hyperparams& h, double window) {
  ChainState st(h, kNoWarp, sim.params, sim.data.spikes, 0.0, h.duration);
  st.assign_all(sim.truth.parents);
  st.set_neighbor_window(window);
  return st;
}

ShardedChain sharded_at_truth(const Simulation& sim, const Hyperparams& h, int shards,
                              double window, std::uint64_t seed) {
  ShardedChain chain(h, kNoWarp, sim.params, sim.data.spikes, shards, seed);
  for (int j = 0; j < shards; ++j) {
    ChainState& st = chain.shard(j);
    std::vector<int> labels(st.num_spikes());
    for (std::size_t i = 0; i < labels.size(); ++i)
      labels[i] = sim.truth.parents[chain.source_index(j, i)];
    st.assign_all(labels);
  }
  chain.set_neighbor_window(window);
  return chain;
}

double median_sweep_seconds(ChainState& st, Rng& rng, int sweeps) {
  std::vector<double> times;
  for (int s = 0; s < sweeps; ++s) {
    Stopwatch clock;
    gibbs_sweep(st, rng);
    times.push_back(clock.seconds());
  }
  return oracle::quantile(times, 0.5);
}

}  // namespace

Outcome ac7_performance() {
  const Hyperparams truth = dense_hyper(1050.0);
  Rng rng(701);
  const auto sim = simulate(truth, kNoWarp, rng);
  const Hyperparams h = inference_hyper(truth);

  // Exact sampler, every cluster offered to every spike.
  ChainState exact = state_at_truth(sim, h, std::numeric_limits<double>::infinity());
  const int k0 = exact.num_clusters();
  Stopwatch clock;
  for (int s = 0; s < 100; ++s) gibbs_sweep(exact, rng);
  const double hundred = clock.seconds();
  note(cat("S=", sim.data.size(), " K=", k0, ": 100 exact sweeps in ", hundred, " s"));

  // Linear scaling: double the recording at fixed event and spike density.
  // The windowed sampler's per-spike cost depends on local cluster density only.
  const double window = 20.0;
  const Hyperparams truth2 = dense_hyper(2100.0);
  const auto sim2 = simulate(truth2, kNoWarp, rng);
  ChainState small = state_at_truth(sim, h, window);
  ChainState large = state_at_truth(sim2, inference_hyper(truth2), window);
  const double t_small = median_sweep_seconds(small, rng, 15);
  const double t_large = median_sweep_seconds(large, rng, 15);
  const double per_spike_ratio =
      (t_large / sim2.data.size()) / (t_small / sim.data.size());
  note(cat("windowed sweep ", t_small, " s at S=", sim.data.size(), ", ", t_large, " s at S=",
           sim2.data.size()));

  const bool pass = sim.data.size() >= 20000 && hundred < 60.0 && per_spike_ratio <= 1.5;
  return {pass, cat("100 sweeps at S=", sim.data.size(), ", K=", k0, ": ", hundred,
                    " s (<60); doubling S and K: sweep time x", t_large / t_small,
                    ", per-spike time x", per_spike_ratio, " (<=1.5)")};
}

Outcome ac8_parallel() {
  // Bitwise equality of one shard with the serial sampler, split-merge included.
  bool identical = true;
  {
    const Hyperparams truth = dense_hyper(200.0);
    Rng sim_rng(801);
    const auto sim = simulate(truth, kNoWarp, sim_rng);
    const Hyperparams h = inference_hyper(truth);
    ChainState serial = state_at_truth(sim, h, std::numeric_limits<double>::infinity());
    ShardedChain sharded =
        sharded_at_truth(sim, h, 1, std::numeric_limits<double>::infinity(), 802);
    Rng a(803), b(803);
    for (int s = 0; s < 30 && identical; ++s) {
      split_merge_moves(serial, 50, a);
      gibbs_sweep(serial, a);
      sharded.split_merge(50, b);
      sharded.sweep(b);
      const ChainState& other = sharded.shard(0);
      identical = serial.labels() == other.labels() && serial.params() == sharded.params();
      for (std::size_t i = 0; identical && i < serial.live_clusters().size(); ++i)
        identical = serial.live_clusters()[i] == other.live_clusters()[i] &&
                    serial.cluster(serial.live_clusters()[i]).event ==
                        other.cluster(other.live_clusters()[i]).event;
    }
    identical = identical && a.save_state() == b.save_state();
  }
  note(cat("P=1 bitwise identical: ", identical ? "yes" : "no"));

  // Throughput at S >= 1e5. Both runs use the same window so the work per
  // spike is the same and any gain comes from concurrency.
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  double speedup = 0.0;
  std::size_t big_s = 0;
  {
    const Hyperparams truth = dense_hyper(5000.0);
    Rng sim_rng(811);
    const auto sim = simulate(truth, kNoWarp, sim_rng);
    big_s = sim.data.size();
    const Hyperparams h = inference_hyper(truth);
    double seconds[2] = {};
    const int shard_counts[2] = {1, 4};
    for (int v = 0; v < 2; ++v) {
      ShardedChain chain = sharded_at_truth(sim, h, shard_counts[v], 20.0, 812);
      Rng rng(813);
      chain.sweep(rng);
      Stopwatch clock;
      for (int s = 0; s < 5; ++s) chain.sweep(rng);
      seconds[v] = clock.seconds() / 5;
    }
    speedup = seconds[0] / seconds[1];
    note(cat("S=", big_s, ": sweep ", seconds[0], " s with P=1, ", seconds[1],
             " s with P=4 on ", cores, " hardware threads"));
  }

  // Post-burn-in training log likelihood, serial against four shards, pooled
  // over five seeds.
  bool overlap = false;
  double iqr[2][2] = {};
  {
    const Hyperparams truth = dense_hyper(500.0);
    Rng sim_rng(821);
    const auto sim = simulate(truth, kNoWarp, sim_rng);
    ChainConfig config;
    config.hyper = inference_hyper(truth);
    config.neighbor_window = 20.0;
    config.schedule.initial_temperature = 500.0;
    config.schedule.num_stages = 20;
    config.schedule.sweeps_per_stage = 100;
    config.schedule.final_sweeps = 300;
    config.schedule.split_merge_moves = 100;
    config.schedule.anneal_split_merge_moves = 20;
    config.schedule.retained = 100;
    const SpeckledMask none(truth.num_neurons, truth.duration, {});
    for (int v = 0; v < 2; ++v) {
      config.threads = v == 0 ? 1 : 4;
      std::vector<double> ll;
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto summary = run_chain(sim.data, config, none, seed);
        std::vector<double> own;
        for (const auto& s : summary.samples) own.push_back(s.train_log_likelihood);
        ll.insert(ll.end(), own.begin(), own.end());
        note(cat("P=", config.threads, " seed ", seed, " median ", oracle::quantile(own, 0.5),
                 " K ", summary.samples.back().num_clusters()));
      }
      iqr[v][0] = oracle::quantile(ll, 0.25);
      iqr[v][1] = oracle::quantile(ll, 0.75);
      note(cat("P=", config.threads, " train log likelihood IQR [", iqr[v][0], ", ", iqr[v][1],
               "]"));
    }
    overlap = std::max(iqr[0][0], iqr[1][0]) <= std::min(iqr[0][1], iqr[1][1]);
  }

  const bool pass = identical && speedup >= 2.0 && overlap;
  return {pass, cat("P=1 bitwise equal to serial: ", identical ? "yes" : "no",
                    "; P=4 throughput x", speedup, " at S=", big_s, " (>=2, ", cores,
                    " hardware threads available); train log likelihood IQR serial [",
                    iqr[0][0], ", ", iqr[0][1], "] vs P=4 [", iqr[1][0], ", ", iqr[1][1],
                    "]: ", overlap ? "overlap" : "disjoint")};
}

}  // namespace acceptance
