#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "ppseq/cluster_stats.hpp"
#include "ppseq/model_context.hpp"
#include "ppseq/types.hpp"

namespace ppseq {

struct ClusterSlot {
  bool live = false;
  ClusterStats stats;
  LatentEvent event;
  std::vector<int> members;
  int live_pos = -1;
  int bucket = -1;
  int bucket_pos = -1;
};

/// Mutable state of one chain (or one time shard of a chain): the spikes it
/// owns, their assignments, the live clusters with their statistics and
/// latent events, and the global parameters.
///
/// Labels: 0 is background, id >= 1 is cluster slot id - 1, -1 is unassigned
/// (only transiently, inside a sweep). Imputed spikes are appended after the
/// observed ones.
class ChainState {
 public:
  static constexpr int kBackground = 0;
  static constexpr int kUnassigned = -1;

  ChainState(const Hyperparams& hyper, const WarpGrid& grid, const GlobalParams& params,
             std::vector<Spike> spikes, double t_lo, double t_hi);

  const ModelContext& context() const { return ctx_; }
  ModelContext& context() { return ctx_; }
  const GlobalParams& params() const { return ctx_.params(); }
  /// Installs new global parameters and rebuilds all cluster statistics.
  void set_params(const GlobalParams& params);
  /// Recomputes statistics of every live cluster from its member list.
  void rebuild();
  void rebuild_cluster(int id);

  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }
  std::size_t num_spikes() const { return spikes_.size(); }
  std::size_t num_observed() const { return num_observed_; }
  const std::vector<Spike>& spikes() const { return spikes_; }
  const Spike& spike(std::size_t i) const { return spikes_[i]; }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }

  int num_clusters() const { return static_cast<int>(live_.size()); }
  const std::vector<int>& live_clusters() const { return live_; }
  const ClusterSlot& cluster(int id) const { return slots_[id - 1]; }
  ClusterSlot& cluster(int id) { return slots_[id - 1]; }
  std::size_t num_slots() const { return slots_.size(); }
  const std::vector<int>& free_slots() const { return free_; }
  std::size_t background_size() const;

  void unassign(std::size_t i);
  void assign(std::size_t i, int label);
  /// Opens an empty live cluster anchored at `anchor` and returns its id.
  int create_cluster(double anchor);

  /// Replaces all assignments. Positive labels group spikes into clusters
  /// created in order of first appearance; latent events are left as
  /// placeholders until resampled.
  void assign_all(std::span<const int> labels);

  /// Adds imputed spikes; `labels` are existing cluster ids or 0.
  void append_imputed(std::span<const Spike> spikes, std::span<const int> labels);
  void clear_imputed();

  /// Restricts candidate clusters to centres within `window` of a spike.
  /// Infinity (the default) keeps the sampler exact.
  void set_neighbor_window(double window);
  double neighbor_window() const { return window_; }

  /// Calls f(id) for each live cluster that may receive a spike at time t.
  template <class F>
  void for_each_candidate(double t, F&& f) const {
    if (buckets_.empty()) {
      for (int id : live_) f(id);
      return;
    }
    const int lo = bucket_of(t - window_);
    const int hi = bucket_of(t + window_);
    for (int b = lo; b <= hi; ++b)
      for (int id : buckets_[b])
        if (std::abs(slots_[id - 1].stats.center() - t) <= window_) f(id);
  }

  /// Full-layout restore used by checkpoints: slot vector, live order and
  /// free list exactly as saved.
  void restore_layout(std::vector<Spike> spikes, std::size_t num_observed,
                      std::vector<int> labels, std::vector<ClusterSlot> slots,
                      std::vector<int> live, std::vector<int> free_list);
  const std::vector<ClusterSlot>& slots() const { return slots_; }

  /// Throws std::logic_error if bookkeeping is inconsistent or statistics have
  /// drifted from a from-scratch rebuild by more than `tol`.
  void check_consistency(double tol = 1e-9) const;

  // Scratch buffers for the assignment sweep.
  std::vector<int> scratch_ids;
  std::vector<double> scratch_weights;

 private:
  void delete_cluster(int id);
  int bucket_of(double t) const;
  void bucket_insert(int id);
  void bucket_erase(int id);
  void bucket_update(int id);
  void rebuild_buckets();

  ModelContext ctx_;
  double t_lo_, t_hi_;
  std::vector<Spike> spikes_;
  std::size_t num_observed_;
  std::vector<int> labels_;
  std::vector<int> member_pos_;
  std::vector<ClusterSlot> slots_;
  std::vector<int> free_;
  std::vector<int> live_;
  double window_ = std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> buckets_;
};

}  // namespace ppseq
