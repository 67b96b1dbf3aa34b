#pragma once

#include <vector>

#include "ppseq/chain_state.hpp"
#include "ppseq/random.hpp"

namespace ppseq {

enum class SweepOrder { ascending, descending, random };

/// Unnormalised log weights for re-assigning one (currently unassigned) spike.
struct AssignmentWeights {
  double background = 0.0;
  std::vector<int> cluster_ids;
  std::vector<double> cluster;
  double new_cluster = 0.0;
};

AssignmentWeights assignment_log_weights(const Spike& spike, const ChainState& state);

/// One pass of collapsed assignment updates over every spike.
void sweep_assignments(ChainState& state, Rng& rng, SweepOrder order = SweepOrder::ascending);

/// Draws (type, warp), time and amplitude of a cluster's latent event.
LatentEvent resample_latent_event(const ClusterStats& stats, const ModelContext& ctx, Rng& rng);
void resample_events(ChainState& state, Rng& rng);

/// Sufficient statistics for the global-parameter conditionals. Additive
/// across time shards.
struct GlobalStats {
  int num_neurons = 0;
  int num_types = 0;
  double exposure = 0.0;
  std::vector<double> bg_counts;      // [N]
  std::vector<double> type_counts;    // [R]
  std::vector<double> spike_counts;   // [R * N], type-major
  std::vector<double> sum_delta;      // [R * N]  sum of (t - tau) / w
  std::vector<double> sum_delta_sq;   // [R * N]

  GlobalStats() = default;
  GlobalStats(int neurons, int types);
  GlobalStats& operator+=(const GlobalStats& other);
};

GlobalStats collect_global_stats(const ChainState& state);

/// Conjugate draws of background rates, type probabilities, neuron weights
/// and (delay, width) pairs.
GlobalParams resample_globals(const GlobalStats& stats, const Hyperparams& hyper, Rng& rng);

/// Assignment sweep, latent events, then global parameters.
void gibbs_sweep(ChainState& state, Rng& rng, SweepOrder order = SweepOrder::ascending);

}  // namespace ppseq
