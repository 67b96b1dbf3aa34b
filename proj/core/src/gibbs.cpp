#include "ppseq/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ppseq/numeric.hpp"

namespace ppseq {

AssignmentWeights assignment_log_weights(const Spike& spike, const ChainState& state) {
  const auto& ctx = state.context();
  AssignmentWeights w;
  w.background = ctx.log_background_weight(spike.neuron);
  const double alpha = ctx.amplitude_shape();
  state.for_each_candidate(spike.time, [&](int id) {
    const auto& stats = state.cluster(id).stats;
    w.cluster_ids.push_back(id);
    w.cluster.push_back(std::log(alpha + stats.size()) + stats.log_predictive(spike, ctx));
  });
  w.new_cluster = ctx.log_new_cluster_weight(spike.neuron);
  return w;
}

namespace {

void reassign(ChainState& state, std::size_t i, Rng& rng) {
  state.unassign(i);
  const Spike& spike = state.spike(i);
  const auto& ctx = state.context();
  const double alpha = ctx.amplitude_shape();

  auto& ids = state.scratch_ids;
  auto& logw = state.scratch_weights;
  ids.clear();
  logw.clear();
  ids.push_back(ChainState::kBackground);
  logw.push_back(ctx.log_background_weight(spike.neuron));
  state.for_each_candidate(spike.time, [&](int id) {
    const auto& stats = state.cluster(id).stats;
    ids.push_back(id);
    logw.push_back(std::log(alpha + stats.size()) + stats.log_predictive(spike, ctx));
  });
  ids.push_back(-1);
  logw.push_back(ctx.log_new_cluster_weight(spike.neuron));

  const std::size_t pick = rng.categorical_log(logw);
  int label = ids[pick];
  if (label < 0) label = state.create_cluster(spike.time);
  state.assign(i, label);
}

}  // namespace

void sweep_assignments(ChainState& state, Rng& rng, SweepOrder order) {
  const std::size_t S = state.num_spikes();
  switch (order) {
    case SweepOrder::ascending:
      for (std::size_t i = 0; i < S; ++i) reassign(state, i, rng);
      break;
    case SweepOrder::descending:
      for (std::size_t i = S; i-- > 0;) reassign(state, i, rng);
      break;
    case SweepOrder::random: {
      std::vector<std::size_t> perm(S);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      for (std::size_t i = S; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
      for (auto i : perm) reassign(state, i, rng);
      break;
    }
  }
}

LatentEvent resample_latent_event(const ClusterStats& stats, const ModelContext& ctx, Rng& rng) {
  const int H = stats.num_hypotheses();
  std::vector<double> lp(static_cast<std::size_t>(H));
  for (int h = 0; h < H; ++h) lp[h] = stats.log_posterior(h);
  const int h = static_cast<int>(rng.categorical_log(lp));
  const double J = stats.sum_precision(h);
  LatentEvent e;
  e.type = ctx.type_of(h);
  e.warp = ctx.warp_of(h);
  e.time = stats.anchor() + rng.normal(stats.sum_linear(h) / J, 1.0 / std::sqrt(J));
  e.amplitude = rng.gamma(ctx.amplitude_shape() + stats.size(), ctx.amplitude_rate() + 1.0);
  return e;
}

void resample_events(ChainState& state, Rng& rng) {
  for (int id : state.live_clusters()) {
    auto& c = state.cluster(id);
    c.event = resample_latent_event(c.stats, state.context(), rng);
  }
}

GlobalStats::GlobalStats(int neurons, int types)
    : num_neurons(neurons),
      num_types(types),
      bg_counts(static_cast<std::size_t>(neurons), 0.0),
      type_counts(static_cast<std::size_t>(types), 0.0),
      spike_counts(static_cast<std::size_t>(neurons) * types, 0.0),
      sum_delta(static_cast<std::size_t>(neurons) * types, 0.0),
      sum_delta_sq(static_cast<std::size_t>(neurons) * types, 0.0) {}

GlobalStats& GlobalStats::operator+=(const GlobalStats& o) {
  exposure += o.exposure;
  auto add = [](std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  };
  add(bg_counts, o.bg_counts);
  add(type_counts, o.type_counts);
  add(spike_counts, o.spike_counts);
  add(sum_delta, o.sum_delta);
  add(sum_delta_sq, o.sum_delta_sq);
  return *this;
}

GlobalStats collect_global_stats(const ChainState& state) {
  const auto& ctx = state.context();
  const int N = ctx.num_neurons();
  GlobalStats g(N, ctx.num_types());
  g.exposure = state.t_hi() - state.t_lo();
  for (std::size_t i = 0; i < state.num_spikes(); ++i)
    if (state.label(i) == ChainState::kBackground) g.bg_counts[state.spike(i).neuron] += 1.0;
  for (int id : state.live_clusters()) {
    const auto& c = state.cluster(id);
    const auto& e = c.event;
    const double w = ctx.grid().values[e.warp];
    g.type_counts[e.type] += 1.0;
    for (int i : c.members) {
      const Spike& s = state.spike(i);
      const std::size_t j = static_cast<std::size_t>(e.type) * N + s.neuron;
      const double d = (s.time - e.time) / w;
      g.spike_counts[j] += 1.0;
      g.sum_delta[j] += d;
      g.sum_delta_sq[j] += d * d;
    }
  }
  return g;
}

GlobalParams resample_globals(const GlobalStats& stats, const Hyperparams& hyper, Rng& rng) {
  const int N = stats.num_neurons;
  const int R = stats.num_types;
  GlobalParams p(N, R);
  for (int n = 0; n < N; ++n)
    p.bg_rates[n] = rng.gamma(hyper.bg_shape + stats.bg_counts[n], hyper.bg_rate + stats.exposure);

  std::vector<double> conc(static_cast<std::size_t>(R));
  for (int r = 0; r < R; ++r) conc[r] = hyper.type_concentration + stats.type_counts[r];
  p.type_probs = rng.dirichlet(conc);

  conc.resize(static_cast<std::size_t>(N));
  for (int r = 0; r < R; ++r) {
    for (int n = 0; n < N; ++n)
      conc[n] = hyper.weight_concentration + stats.spike_counts[p.index(n, r)];
    const auto a = rng.dirichlet(conc);
    for (int n = 0; n < N; ++n) p.weights[p.index(n, r)] = a[n];
  }

  // Normal / scaled inverse chi-squared update on the warped offsets.
  for (int r = 0; r < R; ++r) {
    for (int n = 0; n < N; ++n) {
      const std::size_t j = p.index(n, r);
      const double cnt = stats.spike_counts[j];
      const double sd = stats.sum_delta[j];
      const double kappa = hyper.delay_precision + cnt;
      const double mean = sd / kappa;
      const double dof = hyper.width_dof + cnt;
      // The residual sum is non-negative in exact arithmetic; clamp rounding.
      const double prior_ss = hyper.width_dof * hyper.width_scale;
      const double ss = std::max(prior_ss + stats.sum_delta_sq[j] - sd * sd / kappa, prior_ss);
      p.widths[j] = rng.scaled_inv_chi2(dof, ss / dof);
      p.delays[j] = rng.normal(mean, std::sqrt(p.widths[j] / kappa));
    }
  }
  return p;
}

void gibbs_sweep(ChainState& state, Rng& rng, SweepOrder order) {
  sweep_assignments(state, rng, order);
  resample_events(state, rng);
  const auto stats = collect_global_stats(state);
  state.set_params(resample_globals(stats, state.context().hyper(), rng));
}

}  // namespace ppseq
