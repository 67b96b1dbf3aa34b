#pragma once

#include <vector>

namespace ppseq {

/// Discrete set of time-warp factors with prior probabilities.
struct WarpGrid {
  std::vector<double> values;
  std::vector<double> probs;

  int size() const { return static_cast<int>(values.size()); }
};

/// Log-spaced warp factors between 1/max_warp and max_warp, symmetric about 1.
/// Probabilities follow a discretized Gaussian centred on the middle index.
/// A single-point grid is exactly {1} with probability 1.
WarpGrid build_warp_grid(int num_warps, double max_warp, double warp_variance);

}  // namespace ppseq
