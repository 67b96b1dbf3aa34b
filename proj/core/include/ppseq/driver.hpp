#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppseq/anneal.hpp"
#include "ppseq/gibbs.hpp"
#include "ppseq/mask.hpp"
#include "ppseq/split_merge.hpp"
#include "ppseq/types.hpp"
#include "ppseq/warp_grid.hpp"

namespace ppseq {

struct ChainConfig {
  Hyperparams hyper;
  AnnealSchedule schedule;
  double mask_fraction = 0.0;
  double mask_block_length = 1.0;
  /// Number of time shards swept concurrently.
  int threads = 1;
  SweepOrder order = SweepOrder::ascending;
  /// Clusters whose centre is further than this from a spike are not offered
  /// to it. Infinity keeps the sampler exact; a finite window trades exactness
  /// for per-spike cost independent of the number of clusters.
  double neighbor_window = std::numeric_limits<double>::infinity();

  void validate() const;
};

struct PosteriorSample {
  int sweep = 0;
  std::vector<LatentEvent> events;
  GlobalParams params;
  /// Per dataset spike: -1 held out, 0 background, k >= 1 the cluster whose
  /// event is events[k - 1]. Labels are numbered by first appearance.
  std::vector<int> assignments;
  double train_log_likelihood = 0.0;

  int num_clusters() const;
};

struct TracePoint {
  int sweep = 0;
  double temperature = 1.0;
  int num_clusters = 0;
  std::size_t background = 0;
  double train_log_likelihood = 0.0;
  int split_merge_accepted = 0;
};

struct HeldoutScore {
  /// (model - baseline) test log likelihood per masked neuron-second.
  double excess_nats_per_second = 0.0;
  double model_log_likelihood = 0.0;
  double baseline_log_likelihood = 0.0;
  double masked_area = 0.0;
  std::size_t test_spikes = 0;
};

struct PosteriorSummary {
  std::vector<PosteriorSample> samples;
  std::vector<TracePoint> trace;
  SplitMergeStats split_merge;
  std::optional<HeldoutScore> heldout;

  std::map<int, int> k_histogram() const;
};

struct ChainCheckpoint;

/// Thrown by run_chain after a stop request once the checkpoint is written.
class Interrupted : public std::runtime_error {
 public:
  explicit Interrupted(const std::string& checkpoint_path)
      : std::runtime_error("run interrupted; checkpoint written to " + checkpoint_path),
        path(checkpoint_path) {}
  std::string path;
};

struct RunControl {
  /// Polled after every sweep.
  const std::atomic<bool>* stop = nullptr;
  std::string checkpoint_path;
  /// Continue from this checkpoint instead of initialising.
  const ChainCheckpoint* resume = nullptr;
  std::function<void(const TracePoint&)> on_sweep;
};

/// Runs one chain: all-background initialisation, annealing stages, final
/// sweeps with split-merge moves, retaining the last `retained` final sweeps
/// (every `thin`-th). Spikes inside `mask` are held out and imputed before
/// every sweep. With zero sweeps the summary holds the initial state only;
/// otherwise, if no sweep falls in the retained window, the final state.
PosteriorSummary run_chain(const Dataset& data, const ChainConfig& config,
                           const SpeckledMask& mask, std::uint64_t seed,
                           RunControl* control = nullptr);

/// Independent chains, run concurrently; chain c uses derive_seed(seed, c).
std::vector<PosteriorSummary> run_chains(const Dataset& data, const ChainConfig& config,
                                         const SpeckledMask& mask, std::uint64_t seed,
                                         int num_chains);

/// Test log likelihood of masked spikes averaged over samples, relative to a
/// per-neuron homogeneous Poisson fit on the unmasked data, per unit of
/// masked neuron-time. Throws std::invalid_argument on an empty mask.
HeldoutScore heldout_log_likelihood(const Dataset& data, const SpeckledMask& mask,
                                    std::span<const PosteriorSample> samples,
                                    const WarpGrid& grid);

/// Log likelihood of the unmasked spikes over the unmasked region.
double train_log_likelihood(std::span<const Spike> train, std::span<const LatentEvent> events,
                            const GlobalParams& params, const WarpGrid& grid,
                            const SpeckledMask& mask, double duration);

/// Row-major matrix over dataset spikes [first, last): fraction of samples in
/// which both spikes share a sequence. The diagonal is 1.
std::vector<double> co_occupancy(std::span<const PosteriorSample> samples, std::size_t first,
                                 std::size_t last);

}  // namespace ppseq
