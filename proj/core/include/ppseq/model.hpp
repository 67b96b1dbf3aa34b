#pragma once

#include <span>
#include <vector>

#include "ppseq/types.hpp"
#include "ppseq/warp_grid.hpp"

namespace ppseq {

/// Firing rate of neuron n at time t: background plus the Gaussian impulse
/// responses of every event.
double intensity(double t, int neuron, std::span<const LatentEvent> events,
                 const GlobalParams& params, const WarpGrid& grid);

/// Integral of the impulse responses of `events` on `neuron` over [t0, t1].
/// Background is excluded. Gaussian tails are not truncated at the edges of
/// the recording, so the exact erf form is used.
double integrated_event_intensity(int neuron, double t0, double t1,
                                  std::span<const LatentEvent> events,
                                  const GlobalParams& params, const WarpGrid& grid);

/// Evaluates log intensities at many spikes using a time-sorted copy of the
/// events. Responses further than ~40 standard deviations away underflow to
/// exactly zero, so skipping them leaves results bit-for-bit unchanged.
class IntensityEvaluator {
 public:
  IntensityEvaluator(std::span<const LatentEvent> events, const GlobalParams& params,
                     const WarpGrid& grid);

  double intensity(const Spike& spike) const;
  /// Throws std::domain_error when the intensity is exactly zero.
  double log_intensity(const Spike& spike) const;
  /// Sum of log intensities over `spikes`.
  double sum_log_intensity(std::span<const Spike> spikes) const;

 private:
  std::vector<LatentEvent> sorted_;
  std::vector<double> times_;
  const GlobalParams& params_;
  const WarpGrid& grid_;
  double reach_ = 0.0;
};

/// Poisson-process log likelihood of the data:
///   sum_s log lambda(t_s) - T sum_n bg_n - sum_k A_k.
/// Throws std::domain_error if some spike has zero intensity.
double log_likelihood(const Dataset& data, std::span<const LatentEvent> events,
                      const GlobalParams& params, const WarpGrid& grid);

}  // namespace ppseq
