#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppseq/chain_state.hpp"
#include "ppseq/gibbs.hpp"
#include "ppseq/mask.hpp"
#include "ppseq/random.hpp"
#include "ppseq/split_merge.hpp"

namespace ppseq {

struct ShardRange {
  double t_lo = 0.0;
  double t_hi = 0.0;
  /// Indices into the input spike list.
  std::vector<std::size_t> indices;
};

/// Splits [0, duration) into `shards` half-open intervals of equal length. A
/// spike at exactly `duration` goes to the last shard.
std::vector<ShardRange> shard_dataset(std::span<const Spike> spikes, double duration, int shards);
std::vector<ShardRange> shard_dataset(const Dataset& data, int shards);

/// A chain whose spikes are split into time shards. Each sweep runs
/// assignment and latent-event updates on every shard concurrently, gathers
/// the global sufficient statistics and resamples the global parameters once.
/// Clusters never cross shard boundaries.
///
/// Shard 0 draws from the caller's RNG; shard j >= 1 owns
/// Rng(derive_seed(shard_seed, j)). With one shard a sweep is therefore
/// bit-identical to gibbs_sweep on a single ChainState.
class ShardedChain {
 public:
  ShardedChain(const Hyperparams& hyper, const WarpGrid& grid, const GlobalParams& params,
               std::span<const Spike> spikes, int shards, std::uint64_t shard_seed);

  int num_shards() const { return static_cast<int>(states_.size()); }
  ChainState& shard(int j) { return states_[j]; }
  const ChainState& shard(int j) const { return states_[j]; }
  Rng& shard_rng(int j) { return rngs_[j]; }
  const GlobalParams& params() const { return states_.front().params(); }
  /// Dataset index of spike i of shard j (observed spikes only).
  std::size_t source_index(int j, std::size_t i) const { return sources_[j][i]; }

  void set_params(const GlobalParams& params);
  void set_amplitude_prior(double shape, double rate);
  void set_neighbor_window(double window);

  void sweep(Rng& master, SweepOrder order = SweepOrder::ascending);
  /// Moves are spread over shards in proportion to shard length.
  SplitMergeStats split_merge(int moves, Rng& master);
  /// Replaces imputed spikes with a fresh draw inside the mask.
  void impute(const SpeckledMask& mask, Rng& master);

  GlobalStats gather() const;
  std::vector<LatentEvent> events() const;
  int num_clusters() const;
  std::size_t background_size() const;

 private:
  template <class F>
  void run_parallel(Rng& master, F&& f);

  const Hyperparams hyper_;
  double duration_;
  std::vector<ChainState> states_;
  std::vector<std::vector<std::size_t>> sources_;
  std::vector<Rng> rngs_;
};

}  // namespace ppseq
