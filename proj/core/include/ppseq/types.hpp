#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace ppseq {

// Neuron, type and warp indices are zero-based in memory. File formats use
// one-based neuron ids (see io.hpp).

/// One observed spike.
struct Spike {
  int neuron = 0;
  double time = 0.0;

  friend bool operator==(const Spike&, const Spike&) = default;
};

/// A latent sequence event: onset time, sequence type, amplitude (expected
/// number of evoked spikes) and index into the warp grid.
struct LatentEvent {
  double time = 0.0;
  int type = 0;
  double amplitude = 1.0;
  int warp = 0;

  friend bool operator==(const LatentEvent&, const LatentEvent&) = default;
};

/// Fixed prior quantities of the model.
///
/// Naming follows role rather than symbol:
///   event_rate            sequence events per unit time
///   amplitude_shape/rate  gamma prior on sequence amplitudes
///   type_concentration    symmetric Dirichlet on sequence type probabilities
///   weight_concentration  symmetric Dirichlet on per-type neuron weights
///   width_dof/width_scale scaled inverse chi-squared prior on response widths
///   delay_precision       delays are Normal(0, width / delay_precision)
///   bg_shape/bg_rate      per-neuron gamma prior on background rates used by
///                         inference; the generative sampler draws the total
///                         background rate from it instead (see generative.hpp)
///   bg_concentration      Dirichlet splitting the total background rate
///                         across neurons; only used by forward simulation
struct Hyperparams {
  int num_neurons = 1;
  int num_types = 1;
  double duration = 1.0;

  double event_rate = 0.02;
  double amplitude_shape = 2.0;
  double amplitude_rate = 0.1;
  double type_concentration = 1.0;
  double weight_concentration = 1.0;
  double width_dof = 4.0;
  double width_scale = 1.0;
  double delay_precision = 1.0;
  double bg_shape = 1.0;
  double bg_rate = 1.0;
  double bg_concentration = 1.0;

  int num_warps = 1;
  double max_warp = 1.0;
  double warp_variance = 1.0;

  /// Maximum time separation of a split-merge anchor pair.
  double split_merge_window = std::numeric_limits<double>::infinity();

  /// Throws std::invalid_argument on any non-positive scale or count.
  void validate() const;
};

/// Global parameters. Per-(neuron, type) arrays are stored type-major:
/// element (n, r) lives at r * num_neurons + n.
struct GlobalParams {
  int num_neurons = 0;
  int num_types = 0;
  std::vector<double> bg_rates;
  std::vector<double> type_probs;
  std::vector<double> weights;
  std::vector<double> delays;
  std::vector<double> widths;

  GlobalParams() = default;
  GlobalParams(int neurons, int types);

  std::size_t index(int neuron, int type) const {
    return static_cast<std::size_t>(type) * static_cast<std::size_t>(num_neurons) +
           static_cast<std::size_t>(neuron);
  }
  double weight(int neuron, int type) const { return weights[index(neuron, type)]; }
  double delay(int neuron, int type) const { return delays[index(neuron, type)]; }
  double width(int neuron, int type) const { return widths[index(neuron, type)]; }
  double total_bg_rate() const;

  void validate(double tolerance = 1e-12) const;

  friend bool operator==(const GlobalParams&, const GlobalParams&) = default;
};

/// Spikes on [0, duration] from num_neurons neurons, sorted by time.
struct Dataset {
  int num_neurons = 0;
  double duration = 0.0;
  std::vector<Spike> spikes;

  Dataset() = default;
  /// Sorts spikes into canonical order (time, then neuron) and validates.
  Dataset(int neurons, double duration, std::vector<Spike> spikes);

  std::size_t size() const { return spikes.size(); }
  void validate() const;
};

/// Stable sort by (time, neuron). Duplicates are kept.
void sort_canonical(std::vector<Spike>& spikes);

}  // namespace ppseq
