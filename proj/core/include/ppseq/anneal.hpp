#pragma once

#include <utility>
#include <vector>

namespace ppseq {

struct AnnealSchedule {
  double initial_temperature = 500.0;
  int num_stages = 20;
  int sweeps_per_stage = 100;
  int final_sweeps = 100;
  /// Split-merge moves after each post-annealing sweep.
  int split_merge_moves = 1000;
  /// Split-merge moves after each annealing sweep.
  int anneal_split_merge_moves = 0;
  /// Number of final sweeps kept as posterior samples (counted from the end).
  int retained = 50;
  int thin = 1;

  int total_sweeps() const { return num_stages * sweeps_per_stage + final_sweeps; }
  void validate() const;
};

/// Scales the amplitude prior variance by `temperature` at fixed mean:
/// returns (alpha / temperature, beta / temperature).
std::pair<double, double> anneal_amplitude_prior(double alpha, double beta, double temperature);

/// initial^(1 - j / stages) for j = 0..stages; the last entry is exactly 1.
std::vector<double> temperatures(const AnnealSchedule& schedule);

/// Temperature in force during zero-based sweep `sweep`.
double temperature_at(const AnnealSchedule& schedule, int sweep);

}  // namespace ppseq
