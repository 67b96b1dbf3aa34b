#pragma once

#include <cstddef>
#include <vector>

#include "ppseq/random.hpp"
#include "ppseq/types.hpp"
#include "ppseq/warp_grid.hpp"

namespace ppseq {

/// Draws global parameters from the prior. The total background rate is
/// Gamma(bg_shape, bg_rate) and is split across neurons by a symmetric
/// Dirichlet(bg_concentration). With bg_concentration = bg_shape / N this is
/// equivalent to independent Gamma(bg_shape / N, bg_rate) per-neuron rates.
GlobalParams sample_global_params(const Hyperparams& hyper, Rng& rng);

/// Event count ~ Poisson(event_rate * duration); times uniform on [0, duration].
std::vector<LatentEvent> sample_latent_events(const Hyperparams& hyper, const GlobalParams& params,
                                              const WarpGrid& grid, double duration, Rng& rng);

struct GroundTruth {
  std::vector<LatentEvent> events;
  /// Per spike of the dataset: 0 for background, k + 1 for events[k].
  std::vector<int> parents;
  /// Spikes that fell outside [0, duration] and were dropped.
  std::size_t discarded = 0;
};

struct Simulation {
  Dataset data;
  GlobalParams params;
  GroundTruth truth;
};

/// Background and event-induced spikes in canonical order, with parent labels.
Dataset sample_spikes(std::span<const LatentEvent> events, const GlobalParams& params,
                      const WarpGrid& grid, double duration, Rng& rng,
                      GroundTruth* truth = nullptr);

/// Full forward draw: parameters, events, spikes.
Simulation simulate(const Hyperparams& hyper, const WarpGrid& grid, Rng& rng);

/// Forward draw with fixed global parameters.
Simulation simulate(const Hyperparams& hyper, const GlobalParams& params, const WarpGrid& grid,
                    Rng& rng);

}  // namespace ppseq
