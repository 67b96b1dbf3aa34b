#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ppseq/chain_state.hpp"
#include "ppseq/random.hpp"

namespace ppseq {

/// Unordered pairs of non-background spikes closer than a time window, drawn
/// uniformly. Split-merge moves never touch the background, so one table
/// serves a whole batch of moves.
class PairSampler {
 public:
  PairSampler(const ChainState& state, double window);

  std::uint64_t num_pairs() const { return total_; }
  /// Spike indices (i, j) with t_i <= t_j.
  std::pair<int, int> sample(Rng& rng) const;

 private:
  std::vector<int> order_;                 // non-background spikes by time
  std::vector<std::uint64_t> cumulative_;  // pairs anchored at positions < p
  std::vector<std::uint32_t> reach_;       // partners after position p
  std::uint64_t total_ = 0;
};

struct SplitMergeResult {
  bool proposed = false;
  bool accepted = false;
  bool split = false;
};

struct SplitMergeStats {
  int proposed = 0;
  int accepted = 0;
  int splits = 0;
  int merges = 0;
  SplitMergeStats& operator+=(const SplitMergeStats& o) {
    proposed += o.proposed;
    accepted += o.accepted;
    splits += o.splits;
    merges += o.merges;
    return *this;
  }
};

/// One randomized split-merge Metropolis-Hastings move.
SplitMergeResult split_merge_move(ChainState& state, const PairSampler& pairs, Rng& rng);

/// `moves` moves sharing one pair table; no-op when no qualifying pair exists.
SplitMergeStats split_merge_moves(ChainState& state, int moves, Rng& rng);

}  // namespace ppseq
