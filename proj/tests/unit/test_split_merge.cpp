#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles/oracles.hpp"
#include "ppseq/chain_state.hpp"
#include "ppseq/generative.hpp"
#include "ppseq/gibbs.hpp"
#include "ppseq/partition.hpp"
#include "ppseq/split_merge.hpp"

using namespace ppseq;

namespace {

struct Tiny {
  Hyperparams h;
  WarpGrid grid = build_warp_grid(1, 1.0, 1.0);
  GlobalParams p{2, 1};
  std::vector<Spike> x;

  explicit Tiny(int n) {
    h.num_neurons = 2;
    h.duration = 10.0;
    h.event_rate = 0.3;
    h.amplitude_shape = 1.5;
    h.amplitude_rate = 0.5;
    p.bg_rates = {0.0, 0.0};
    p.weights = {0.5, 0.5};
    p.delays = {0.0, 0.2};
    p.widths = {0.3, 0.3};
    const double times[] = {4.6, 5.0, 5.3, 6.1, 4.9};
    for (int i = 0; i < n; ++i) x.push_back({i % 2, times[i]});
  }

  // Exact posterior over partitions of all spikes into clusters.
  std::map<std::vector<int>, double> posterior(const ModelContext& ctx) const {
    std::map<std::vector<int>, double> out;
    double z = 0.0;
    for (const auto& part : oracle::set_partitions(static_cast<int>(x.size()))) {
      std::map<int, std::vector<Spike>> groups;
      for (std::size_t i = 0; i < x.size(); ++i) groups[part[i]].push_back(x[i]);
      std::vector<int> sizes;
      double lp = 0.0;
      for (auto& [k, g] : groups) {
        sizes.push_back(static_cast<int>(g.size()));
        lp += log_marginal_cluster(g, ctx);
      }
      lp += log_partition_prior(0, sizes, h, 0.0);
      std::vector<int> labels;
      for (int b : part) labels.push_back(b + 1);
      out[labels] = std::exp(lp);
      z += std::exp(lp);
    }
    for (auto& [k, v] : out) v /= z;
    return out;
  }
};

}  // namespace

TEST(PairSampler, CountsPairsWithinWindow) {
  Hyperparams h;
  h.num_neurons = 1;
  h.duration = 100.0;
  const auto grid = build_warp_grid(1, 1.0, 1.0);
  Rng rng(20);
  std::vector<Spike> x;
  for (int i = 0; i < 60; ++i) x.push_back({0, rng.uniform(0.0, 100.0)});
  ChainState st(h, grid, GlobalParams(1, 1), x, 0.0, 100.0);
  std::vector<int> labels(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) labels[i] = i % 4 == 0 ? 0 : 1 + static_cast<int>(i % 3);
  st.assign_all(labels);
  for (double window : {0.5, 3.0, 1e9}) {
    std::uint64_t brute = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = i + 1; j < x.size(); ++j)
        if (labels[i] > 0 && labels[j] > 0 && std::abs(x[i].time - x[j].time) < window) ++brute;
    PairSampler ps(st, window);
    EXPECT_EQ(ps.num_pairs(), brute) << "window " << window;
    if (brute == 0) continue;
    for (int k = 0; k < 200; ++k) {
      auto [a, b] = ps.sample(rng);
      EXPECT_NE(a, b);
      EXPECT_GT(st.label(a), 0);
      EXPECT_GT(st.label(b), 0);
      EXPECT_LT(std::abs(st.spike(a).time - st.spike(b).time), window);
    }
  }
}

TEST(SplitMerge, KeepsStateConsistent) {
  Hyperparams h;
  h.num_neurons = 6;
  h.num_types = 2;
  h.duration = 80.0;
  h.event_rate = 0.1;
  h.amplitude_shape = 10.0;
  h.amplitude_rate = 1.0;
  h.width_scale = 0.05;
  h.split_merge_window = 2.0;
  const auto grid = build_warp_grid(3, 1.3, 1.0);
  Rng rng(21);
  const auto sim = simulate(h, grid, rng);
  ChainState st(h, grid, sim.params, sim.data.spikes, 0.0, h.duration);
  // Start from the planted partition; at temperature one new clusters are rare.
  st.assign_all(sim.truth.parents);
  SplitMergeStats total;
  for (int s = 0; s < 10; ++s) {
    gibbs_sweep(st, rng);
    total += split_merge_moves(st, 50, rng);
    st.check_consistency();
  }
  EXPECT_EQ(total.proposed, 500);
  EXPECT_EQ(total.accepted, total.splits + total.merges);
  EXPECT_GT(total.accepted, 0);
}

// Split-merge alone is a valid kernel on clusters-only partitions.
TEST(SplitMerge, AloneMatchesEnumerationOnThreeSpikes) {
  Tiny t(3);
  ChainState st(t.h, t.grid, t.p, t.x, 0.0, t.h.duration);
  const auto exact = t.posterior(st.context());
  ASSERT_EQ(exact.size(), 5u);
  st.assign_all(std::vector<int>{1, 1, 1});
  Rng rng(22);
  std::map<std::vector<int>, std::vector<double>> hits;
  for (const auto& [k, v] : exact) hits[k].reserve(200000);
  for (int s = 0; s < 200000; ++s) {
    split_merge_moves(st, 1, rng);
    const auto l = oracle::canonical_labels(st.labels());
    for (auto& [k, v] : hits) v.push_back(k == l ? 1.0 : 0.0);
  }
  for (const auto& [k, p] : exact) {
    const auto est = oracle::batch_means(hits[k]);
    EXPECT_NEAR(est.mean, p, 3.0 * est.se + 2e-3);
  }
}
