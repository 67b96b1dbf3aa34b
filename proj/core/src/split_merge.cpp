#include "ppseq/split_merge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ppseq/gibbs.hpp"

namespace ppseq {

PairSampler::PairSampler(const ChainState& state, double window) {
  for (std::size_t i = 0; i < state.num_spikes(); ++i)
    if (state.label(i) > 0) order_.push_back(static_cast<int>(i));
  std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
    return state.spike(a).time < state.spike(b).time;
  });
  const std::size_t m = order_.size();
  cumulative_.assign(m + 1, 0);
  reach_.assign(m, 0);
  std::size_t q = 0;
  for (std::size_t p = 0; p < m; ++p) {
    q = std::max(q, p + 1);
    const double tp = state.spike(order_[p]).time;
    while (q < m && state.spike(order_[q]).time - tp < window) ++q;
    reach_[p] = static_cast<std::uint32_t>(q - p - 1);
    cumulative_[p + 1] = cumulative_[p] + reach_[p];
  }
  total_ = cumulative_[m];
}

std::pair<int, int> PairSampler::sample(Rng& rng) const {
  const std::uint64_t u = rng.index(total_);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const std::size_t p = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const std::size_t q = p + 1 + static_cast<std::size_t>(u - cumulative_[p]);
  return {order_[p], order_[q]};
}

namespace {

constexpr double kLn2 = std::numbers::ln2;

ClusterStats build_stats(const ChainState& state, const std::vector<int>& members) {
  ClusterStats s;
  s.reset(state.spike(members.front()).time, state.context().num_hypotheses());
  for (int i : members) s.add(state.spike(i), state.context());
  s.refresh(state.context());
  return s;
}

}  // namespace

SplitMergeResult split_merge_move(ChainState& state, const PairSampler& pairs, Rng& rng) {
  SplitMergeResult result;
  if (pairs.num_pairs() == 0) return result;
  result.proposed = true;

  const auto& ctx = state.context();
  const double alpha = ctx.amplitude_shape();
  const int K = state.num_clusters();
  const double log_T = ctx.log_duration();
  auto [i, j] = pairs.sample(rng);
  const int ci = state.label(i);
  const int cj = state.label(j);

  if (ci == cj) {
    // Split: i and j seed two clusters, every other member picks one by coin.
    const auto& old = state.cluster(ci);
    const int n = static_cast<int>(old.members.size());
    std::vector<int> side_i{i}, side_j{j};
    for (int m : old.members) {
      if (m == i || m == j) continue;
      (rng.bernoulli() ? side_i : side_j).push_back(m);
    }
    const auto si = build_stats(state, side_i);
    const auto sj = build_stats(state, side_j);
    const double ni = static_cast<double>(side_i.size());
    const double nj = static_cast<double>(side_j.size());
    const double log_ratio = ctx.log_V(K + 1) - ctx.log_V(K) + std::lgamma(ni + alpha) +
                             std::lgamma(nj + alpha) - std::lgamma(n + alpha) -
                             std::lgamma(alpha) + si.log_evidence() + sj.log_evidence() -
                             old.stats.log_evidence() - log_T + (n - 2) * kLn2;
    result.split = true;
    if (!(std::log(rng.uniform()) < log_ratio)) return result;

    // Keep side i in the existing slot, move side j to a fresh cluster.
    const int fresh = state.create_cluster(state.spike(j).time);
    for (int m : side_j) state.assign(static_cast<std::size_t>(m), fresh);
    state.rebuild_cluster(ci);
    state.rebuild_cluster(fresh);
    auto& a = state.cluster(ci);
    a.event = resample_latent_event(a.stats, ctx, rng);
    auto& b = state.cluster(fresh);
    b.event = resample_latent_event(b.stats, ctx, rng);
    result.accepted = true;
    return result;
  }

  // Merge the clusters of i and j.
  const auto& a = state.cluster(ci);
  const auto& b = state.cluster(cj);
  std::vector<int> merged = a.members;
  merged.insert(merged.end(), b.members.begin(), b.members.end());
  const auto sm = build_stats(state, merged);
  const double na = static_cast<double>(a.members.size());
  const double nb = static_cast<double>(b.members.size());
  const double n = na + nb;
  const double log_ratio = ctx.log_V(K - 1) - ctx.log_V(K) + std::lgamma(n + alpha) +
                           std::lgamma(alpha) - std::lgamma(na + alpha) -
                           std::lgamma(nb + alpha) + sm.log_evidence() + log_T -
                           a.stats.log_evidence() - b.stats.log_evidence() - (n - 2) * kLn2;
  if (!(std::log(rng.uniform()) < log_ratio)) return result;

  const std::vector<int> moving = b.members;
  for (int m : moving) state.assign(static_cast<std::size_t>(m), ci);
  state.rebuild_cluster(ci);
  auto& c = state.cluster(ci);
  c.event = resample_latent_event(c.stats, ctx, rng);
  result.accepted = true;
  return result;
}

SplitMergeStats split_merge_moves(ChainState& state, int moves, Rng& rng) {
  SplitMergeStats stats;
  if (moves <= 0) return stats;
  const PairSampler pairs(state, state.context().hyper().split_merge_window);
  if (pairs.num_pairs() == 0) return stats;
  for (int m = 0; m < moves; ++m) {
    const auto r = split_merge_move(state, pairs, rng);
    stats.proposed += r.proposed;
    if (r.accepted) {
      ++stats.accepted;
      (r.split ? stats.splits : stats.merges) += 1;
    }
  }
  return stats;
}

}  // namespace ppseq
