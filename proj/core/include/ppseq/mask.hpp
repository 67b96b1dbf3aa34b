#pragma once

#include <span>
#include <vector>

#include "ppseq/random.hpp"
#include "ppseq/types.hpp"
#include "ppseq/warp_grid.hpp"

namespace ppseq {

/// Half-open interval [start, end) of one neuron withheld from training.
struct TimeBlock {
  int neuron = 0;
  double start = 0.0;
  double end = 0.0;

  friend bool operator==(const TimeBlock&, const TimeBlock&) = default;
};

/// Set of withheld neuron-time blocks, stored sorted by (neuron, start).
class SpeckledMask {
 public:
  SpeckledMask() = default;
  SpeckledMask(int num_neurons, double duration, std::vector<TimeBlock> blocks);

  bool empty() const { return blocks_.empty(); }
  const std::vector<TimeBlock>& blocks() const { return blocks_; }
  int num_neurons() const { return num_neurons_; }
  double duration() const { return duration_; }

  bool contains(const Spike& spike) const;
  double masked_duration(int neuron) const { return per_neuron_[neuron]; }
  /// Total masked neuron-seconds.
  double total_area() const;

 private:
  int num_neurons_ = 0;
  double duration_ = 0.0;
  std::vector<TimeBlock> blocks_;
  std::vector<std::size_t> first_;  // index of each neuron's first block
  std::vector<double> per_neuron_;
};

/// Tiles each neuron's recording into blocks of `block_length` seconds and
/// withholds round(fraction * count) of them, chosen uniformly without
/// replacement.
SpeckledMask make_speckled_mask(const Dataset& data, double fraction, double block_length,
                                Rng& rng);

struct MaskedSplit {
  std::vector<Spike> train;
  std::vector<Spike> test;
  /// Dataset index of each train / test spike.
  std::vector<std::size_t> train_index;
  std::vector<std::size_t> test_index;
};

MaskedSplit split_by_mask(const Dataset& data, const SpeckledMask& mask);

/// Draws spikes inside the masked blocks from background plus the given
/// events. `parents` receives 0 for background or k + 1 for events[k].
std::vector<Spike> impute_masked_spikes(std::span<const LatentEvent> events,
                                        const GlobalParams& params, const WarpGrid& grid,
                                        const SpeckledMask& mask, Rng& rng,
                                        std::vector<int>* parents = nullptr);

/// Expected number of spikes inside the mask.
double masked_intensity_integral(std::span<const LatentEvent> events, const GlobalParams& params,
                                 const WarpGrid& grid, const SpeckledMask& mask);

}  // namespace ppseq
