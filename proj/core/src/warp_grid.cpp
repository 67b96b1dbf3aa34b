#include "ppseq/warp_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace ppseq {

WarpGrid build_warp_grid(int num_warps, double max_warp, double warp_variance) {
  if (num_warps < 1) throw std::invalid_argument("warp grid: num_warps must be >= 1");
  if (!(max_warp >= 1.0) || !std::isfinite(max_warp))
    throw std::invalid_argument("warp grid: max_warp must be >= 1");
  if (!(warp_variance > 0.0)) throw std::invalid_argument("warp grid: warp_variance must be > 0");

  WarpGrid grid;
  if (num_warps == 1) {
    grid.values = {1.0};
    grid.probs = {1.0};
    return grid;
  }

  const int last = num_warps - 1;
  const double center = 0.5 * last;
  const double log_max = std::log(max_warp);
  grid.values.resize(num_warps);
  grid.probs.resize(num_warps);
  double total = 0.0;
  for (int f = 0; f < num_warps; ++f) {
    // Mirror indices produce exactly negated exponents, so w_f * w_{F-1-f} == 1
    // up to a single rounding of exp.
    const double exponent = (2.0 * f - last) / last;
    grid.values[f] = (2 * f == last) ? 1.0 : std::exp(exponent * log_max);
    const double d = f - center;
    grid.probs[f] = std::exp(-0.5 * d * d / warp_variance);
    total += grid.probs[f];
  }
  for (double& p : grid.probs) p /= total;
  return grid;
}

}  // namespace ppseq
