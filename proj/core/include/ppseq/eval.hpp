#pragma once

#include <span>
#include <vector>

#include "ppseq/driver.hpp"
#include "ppseq/types.hpp"

namespace ppseq {

/// ceil(duration / bin_size) bins; bin b covers [b * bin, (b + 1) * bin).
std::size_t num_bins(double duration, double bin_size);

/// Per bin, the fraction of samples with at least one event time in the bin.
std::vector<double> event_rate_vector(std::span<const std::vector<LatentEvent>> samples,
                                      double bin_size, double duration);
std::vector<double> event_rate_vector(std::span<const PosteriorSample> samples, double bin_size,
                                      double duration);

/// 1 for bins containing at least one event time, else 0.
std::vector<double> event_indicator_vector(std::span<const LatentEvent> events, double bin_size,
                                           double duration);

/// Area under the ROC curve via the Mann-Whitney rank statistic (ties count
/// one half). Throws std::invalid_argument unless truth has both classes.
double roc_auc(std::span<const double> scores, std::span<const double> truth);

struct RocPoint {
  double threshold;
  double false_positive_rate;
  double true_positive_rate;
};

/// ROC curve from a sweep over every distinct score, highest first, starting
/// at (0, 0) and ending at (1, 1).
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const double> truth);
/// Trapezoidal area under roc_curve.
double roc_curve_area(std::span<const RocPoint> curve);

/// shifted[b] = scores[b - shift], zero-filled: a positive shift moves scores
/// later in time.
std::vector<double> shift_scores(std::span<const double> scores, int shift);

struct ShiftedAuc {
  double auc = 0.0;
  int shift = 0;
};

/// Best AUC over integer shifts in [-max_shift, max_shift]. Ties go to the
/// smallest |shift|, then to the negative shift.
ShiftedAuc shifted_roc_auc(std::span<const double> scores, std::span<const double> truth,
                           int max_shift);

}  // namespace ppseq
