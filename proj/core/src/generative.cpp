#include "ppseq/generative.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

namespace ppseq {

GlobalParams sample_global_params(const Hyperparams& hyper, Rng& rng) {
  hyper.validate();
  const int N = hyper.num_neurons;
  const int R = hyper.num_types;
  GlobalParams p(N, R);

  const double total_bg = rng.gamma(hyper.bg_shape, hyper.bg_rate);
  const auto split = rng.dirichlet(static_cast<std::size_t>(N), hyper.bg_concentration);
  for (int n = 0; n < N; ++n) p.bg_rates[n] = total_bg * split[n];

  p.type_probs = rng.dirichlet(static_cast<std::size_t>(R), hyper.type_concentration);
  for (int r = 0; r < R; ++r) {
    const auto a = rng.dirichlet(static_cast<std::size_t>(N), hyper.weight_concentration);
    for (int n = 0; n < N; ++n) {
      const std::size_t i = p.index(n, r);
      p.weights[i] = a[n];
      p.widths[i] = rng.scaled_inv_chi2(hyper.width_dof, hyper.width_scale);
      p.delays[i] = rng.normal(0.0, std::sqrt(p.widths[i] / hyper.delay_precision));
    }
  }
  return p;
}

std::vector<LatentEvent> sample_latent_events(const Hyperparams& hyper, const GlobalParams& params,
                                              const WarpGrid& grid, double duration, Rng& rng) {
  const auto k = rng.poisson(hyper.event_rate * duration);
  std::vector<LatentEvent> events;
  events.reserve(k);
  for (std::uint64_t i = 0; i < k; ++i) {
    LatentEvent e;
    e.time = rng.uniform(0.0, duration);
    e.type = static_cast<int>(rng.categorical(params.type_probs));
    e.amplitude = rng.gamma(hyper.amplitude_shape, hyper.amplitude_rate);
    e.warp = static_cast<int>(rng.categorical(grid.probs));
    events.push_back(e);
  }
  return events;
}

Dataset sample_spikes(std::span<const LatentEvent> events, const GlobalParams& params,
                      const WarpGrid& grid, double duration, Rng& rng, GroundTruth* truth) {
  const int N = params.num_neurons;
  std::vector<Spike> spikes;
  std::vector<int> labels;
  std::size_t discarded = 0;

  const double total_bg = params.total_bg_rate();
  if (total_bg > 0.0) {
    const auto count = rng.poisson(total_bg * duration);
    for (std::uint64_t i = 0; i < count; ++i) {
      const int n = static_cast<int>(rng.categorical(params.bg_rates));
      spikes.push_back({n, rng.uniform(0.0, duration)});
      labels.push_back(0);
    }
  }

  std::vector<double> a(static_cast<std::size_t>(N));
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& e = events[k];
    const double w = grid.values[e.warp];
    for (int n = 0; n < N; ++n) a[n] = params.weight(n, e.type);
    const auto count = rng.poisson(e.amplitude);
    for (std::uint64_t i = 0; i < count; ++i) {
      const int n = static_cast<int>(rng.categorical(a));
      const double t =
          rng.normal(e.time + w * params.delay(n, e.type), w * std::sqrt(params.width(n, e.type)));
      if (t < 0.0 || t > duration) {
        ++discarded;
        continue;
      }
      spikes.push_back({n, t});
      labels.push_back(static_cast<int>(k) + 1);
    }
  }

  std::vector<std::size_t> order(spikes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const auto& a1 = spikes[i];
    const auto& b1 = spikes[j];
    return a1.time < b1.time || (a1.time == b1.time && a1.neuron < b1.neuron);
  });
  std::vector<Spike> sorted;
  sorted.reserve(spikes.size());
  std::vector<int> sorted_labels;
  sorted_labels.reserve(spikes.size());
  for (auto i : order) {
    sorted.push_back(spikes[i]);
    sorted_labels.push_back(labels[i]);
  }

  if (truth) {
    truth->events.assign(events.begin(), events.end());
    truth->parents = std::move(sorted_labels);
    truth->discarded = discarded;
  }
  Dataset data;
  data.num_neurons = N;
  data.duration = duration;
  data.spikes = std::move(sorted);
  return data;
}

Simulation simulate(const Hyperparams& hyper, const GlobalParams& params, const WarpGrid& grid,
                    Rng& rng) {
  Simulation sim;
  sim.params = params;
  const auto events = sample_latent_events(hyper, params, grid, hyper.duration, rng);
  sim.data = sample_spikes(events, params, grid, hyper.duration, rng, &sim.truth);
  const std::size_t induced =
      sim.truth.discarded +
      static_cast<std::size_t>(std::count_if(sim.truth.parents.begin(), sim.truth.parents.end(),
                                              [](int p) { return p > 0; }));
  if (induced > 100 && sim.truth.discarded * 100 > induced)
    std::clog << "warning: " << sim.truth.discarded << " of " << induced
              << " sequence spikes fell outside the recording and were discarded\n";
  return sim;
}

Simulation simulate(const Hyperparams& hyper, const WarpGrid& grid, Rng& rng) {
  const auto params = sample_global_params(hyper, rng);
  return simulate(hyper, params, grid, rng);
}

}  // namespace ppseq
