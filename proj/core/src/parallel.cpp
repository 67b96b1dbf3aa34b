#include "ppseq/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace ppseq {

std::vector<ShardRange> shard_dataset(std::span<const Spike> spikes, double duration, int shards) {
  if (shards < 1) throw std::invalid_argument("shard_dataset: need at least one shard");
  std::vector<ShardRange> out(static_cast<std::size_t>(shards));
  for (int j = 0; j < shards; ++j) {
    out[j].t_lo = duration * j / shards;
    out[j].t_hi = duration * (j + 1) / shards;
  }
  for (std::size_t i = 0; i < spikes.size(); ++i) {
    const double t = spikes[i].time;
    auto j = static_cast<int>(std::floor(t * shards / duration));
    j = std::clamp(j, 0, shards - 1);
    // Guard the floor against rounding at the boundaries.
    while (j > 0 && t < out[j].t_lo) --j;
    while (j + 1 < shards && t >= out[j + 1].t_lo) ++j;
    out[j].indices.push_back(i);
  }
  return out;
}

std::vector<ShardRange> shard_dataset(const Dataset& data, int shards) {
  return shard_dataset(data.spikes, data.duration, shards);
}

ShardedChain::ShardedChain(const Hyperparams& hyper, const WarpGrid& grid,
                           const GlobalParams& params, std::span<const Spike> spikes, int shards,
                           std::uint64_t shard_seed)
    : hyper_(hyper), duration_(hyper.duration) {
  const auto ranges = shard_dataset(spikes, hyper.duration, shards);
  states_.reserve(ranges.size());
  for (const auto& r : ranges) {
    std::vector<Spike> local;
    local.reserve(r.indices.size());
    for (auto i : r.indices) local.push_back(spikes[i]);
    states_.emplace_back(hyper, grid, params, std::move(local), r.t_lo, r.t_hi);
    sources_.push_back(r.indices);
  }
  rngs_.emplace_back(0);  // placeholder: shard 0 uses the caller's RNG
  for (int j = 1; j < shards; ++j) rngs_.emplace_back(derive_seed(shard_seed, j));
}

void ShardedChain::set_params(const GlobalParams& params) {
  for (auto& s : states_) s.set_params(params);
}

void ShardedChain::set_amplitude_prior(double shape, double rate) {
  for (auto& s : states_) s.context().set_amplitude_prior(shape, rate);
  // Cached cluster posteriors do not depend on the amplitude prior.
}

void ShardedChain::set_neighbor_window(double window) {
  for (auto& s : states_) s.set_neighbor_window(window);
}

template <class F>
void ShardedChain::run_parallel(Rng& master, F&& f) {
  const int P = num_shards();
  if (P == 1) {
    f(0, master);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(P));
  {
    std::vector<std::jthread> workers;
    workers.reserve(static_cast<std::size_t>(P) - 1);
    for (int j = 1; j < P; ++j)
      workers.emplace_back([&, j] {
        try {
          f(j, rngs_[j]);
        } catch (...) {
          errors[j] = std::current_exception();
        }
      });
    try {
      f(0, master);
    } catch (...) {
      errors[0] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void ShardedChain::sweep(Rng& master, SweepOrder order) {
  run_parallel(master, [&](int j, Rng& rng) {
    sweep_assignments(states_[j], rng, order);
    resample_events(states_[j], rng);
  });
  set_params(resample_globals(gather(), hyper_, master));
}

SplitMergeStats ShardedChain::split_merge(int moves, Rng& master) {
  const int P = num_shards();
  std::vector<SplitMergeStats> stats(static_cast<std::size_t>(P));
  run_parallel(master, [&](int j, Rng& rng) {
    const auto& s = states_[j];
    const int local = P == 1 ? moves
                             : static_cast<int>(std::llround(moves * (s.t_hi() - s.t_lo()) /
                                                             duration_));
    stats[j] = split_merge_moves(states_[j], local, rng);
  });
  SplitMergeStats total;
  for (const auto& s : stats) total += s;
  return total;
}

void ShardedChain::impute(const SpeckledMask& mask, Rng& master) {
  for (auto& s : states_) s.clear_imputed();
  if (mask.empty()) return;
  std::vector<LatentEvent> events;
  std::vector<std::pair<int, int>> owner;  // (shard, cluster id)
  for (int j = 0; j < num_shards(); ++j)
    for (int id : states_[j].live_clusters()) {
      events.push_back(states_[j].cluster(id).event);
      owner.emplace_back(j, id);
    }
  std::vector<int> parents;
  const auto spikes = impute_masked_spikes(events, params(), states_.front().context().grid(),
                                           mask, master, &parents);
  // Event-induced spikes join their parent's shard; background spikes go by time.
  const int P = num_shards();
  std::vector<std::vector<Spike>> local(static_cast<std::size_t>(P));
  std::vector<std::vector<int>> labels(static_cast<std::size_t>(P));
  for (std::size_t i = 0; i < spikes.size(); ++i) {
    int j;
    int label = 0;
    if (parents[i] > 0) {
      std::tie(j, label) = owner[parents[i] - 1];
    } else {
      j = std::clamp(static_cast<int>(std::floor(spikes[i].time * P / duration_)), 0, P - 1);
    }
    local[j].push_back(spikes[i]);
    labels[j].push_back(label);
  }
  for (int j = 0; j < P; ++j) states_[j].append_imputed(local[j], labels[j]);
}

GlobalStats ShardedChain::gather() const {
  GlobalStats total = collect_global_stats(states_.front());
  for (std::size_t j = 1; j < states_.size(); ++j) total += collect_global_stats(states_[j]);
  return total;
}

std::vector<LatentEvent> ShardedChain::events() const {
  std::vector<LatentEvent> out;
  for (const auto& s : states_)
    for (int id : s.live_clusters()) out.push_back(s.cluster(id).event);
  return out;
}

int ShardedChain::num_clusters() const {
  int k = 0;
  for (const auto& s : states_) k += s.num_clusters();
  return k;
}

std::size_t ShardedChain::background_size() const {
  std::size_t n = 0;
  for (const auto& s : states_) n += s.background_size();
  return n;
}

}  // namespace ppseq
