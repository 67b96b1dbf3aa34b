#include "ppseq/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ppseq {

std::size_t num_bins(double duration, double bin_size) {
  if (!(bin_size > 0.0)) throw std::invalid_argument("bin_size must be positive");
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
  // The epsilon keeps exact multiples such as 2000 / 0.2 from gaining a bin.
  return static_cast<std::size_t>(std::ceil(duration / bin_size - 1e-9));
}

namespace {

long bin_of(double t, double bin_size, std::size_t bins) {
  if (t < 0.0) return -1;
  const auto b = static_cast<long>(std::floor(t / bin_size));
  return b < static_cast<long>(bins) ? b : -1;
}

void check_pair(std::span<const double> scores, std::span<const double> truth) {
  if (scores.size() != truth.size())
    throw std::invalid_argument("roc: score and truth lengths differ");
  std::size_t pos = 0;
  for (double t : truth) pos += t > 0.5;
  if (pos == 0 || pos == truth.size())
    throw std::invalid_argument("roc: truth must contain both positive and negative bins");
}

}  // namespace

std::vector<double> event_rate_vector(std::span<const std::vector<LatentEvent>> samples,
                                      double bin_size, double duration) {
  const std::size_t B = num_bins(duration, bin_size);
  std::vector<double> out(B, 0.0);
  if (samples.empty()) return out;
  std::vector<std::size_t> seen(B, static_cast<std::size_t>(-1));
  for (std::size_t s = 0; s < samples.size(); ++s)
    for (const auto& e : samples[s]) {
      const long b = bin_of(e.time, bin_size, B);
      if (b < 0 || seen[b] == s) continue;
      seen[b] = s;
      out[b] += 1.0;
    }
  for (double& v : out) v /= static_cast<double>(samples.size());
  return out;
}

std::vector<double> event_rate_vector(std::span<const PosteriorSample> samples, double bin_size,
                                      double duration) {
  std::vector<std::vector<LatentEvent>> events;
  events.reserve(samples.size());
  for (const auto& s : samples) events.push_back(s.events);
  return event_rate_vector(events, bin_size, duration);
}

std::vector<double> event_indicator_vector(std::span<const LatentEvent> events, double bin_size,
                                           double duration) {
  const std::size_t B = num_bins(duration, bin_size);
  std::vector<double> out(B, 0.0);
  for (const auto& e : events) {
    const long b = bin_of(e.time, bin_size, B);
    if (b >= 0) out[b] = 1.0;
  }
  return out;
}

double roc_auc(std::span<const double> scores, std::span<const double> truth) {
  check_pair(scores, truth);
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of midranks of the positives.
  double rank_sum = 0.0;
  double pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t k = i;
    while (k < n && scores[idx[k]] == scores[idx[i]]) ++k;
    const double midrank = 0.5 * static_cast<double>(i + 1 + k);
    for (std::size_t m = i; m < k; ++m)
      if (truth[idx[m]] > 0.5) {
        rank_sum += midrank;
        pos += 1.0;
      }
    i = k;
  }
  const double neg = static_cast<double>(n) - pos;
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const double> truth) {
  check_pair(scores, truth);
  std::vector<double> thresholds(scores.begin(), scores.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  double P = 0.0;
  for (double t : truth) P += t > 0.5;
  const double N = static_cast<double>(truth.size()) - P;

  std::vector<RocPoint> curve;
  curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  for (double th : thresholds) {
    double tp = 0.0, fp = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i)
      if (scores[i] >= th) (truth[i] > 0.5 ? tp : fp) += 1.0;
    curve.push_back({th, fp / N, tp / P});
  }
  return curve;
}

double roc_curve_area(std::span<const RocPoint> curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += (curve[i].false_positive_rate - curve[i - 1].false_positive_rate) *
            0.5 * (curve[i].true_positive_rate + curve[i - 1].true_positive_rate);
  return area;
}

std::vector<double> shift_scores(std::span<const double> scores, int shift) {
  const long n = static_cast<long>(scores.size());
  std::vector<double> out(scores.size(), 0.0);
  for (long b = 0; b < n; ++b) {
    const long src = b - shift;
    if (src >= 0 && src < n) out[b] = scores[src];
  }
  return out;
}

ShiftedAuc shifted_roc_auc(std::span<const double> scores, std::span<const double> truth,
                           int max_shift) {
  if (max_shift < 0) throw std::invalid_argument("shifted_roc_auc: max_shift must be >= 0");
  check_pair(scores, truth);
  ShiftedAuc best{roc_auc(scores, truth), 0};
  for (int m = 1; m <= max_shift; ++m)
    for (int shift : {-m, m}) {
      const double auc = roc_auc(shift_scores(scores, shift), truth);
      if (auc > best.auc) best = {auc, shift};
    }
  return best;
}

}  // namespace ppseq
