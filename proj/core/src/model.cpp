#include "ppseq/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ppseq/numeric.hpp"

namespace ppseq {

namespace {

// exp(-x^2/2) is exactly zero in double precision once x > ~38.6.
constexpr double kUnderflowSd = 40.0;

double response(double t, int n, const LatentEvent& e, const GlobalParams& p,
                const WarpGrid& grid) {
  const double w = grid.values[e.warp];
  const std::size_t i = p.index(n, e.type);
  const double a = p.weights[i];
  if (a == 0.0) return 0.0;
  return e.amplitude * a * normal_pdf(t, e.time + w * p.delays[i], w * w * p.widths[i]);
}

}  // namespace

double intensity(double t, int neuron, std::span<const LatentEvent> events,
                 const GlobalParams& params, const WarpGrid& grid) {
  double rate = params.bg_rates[neuron];
  for (const auto& e : events) rate += response(t, neuron, e, params, grid);
  return rate;
}

double integrated_event_intensity(int neuron, double t0, double t1,
                                  std::span<const LatentEvent> events,
                                  const GlobalParams& params, const WarpGrid& grid) {
  double total = 0.0;
  for (const auto& e : events) {
    const double w = grid.values[e.warp];
    const std::size_t i = params.index(neuron, e.type);
    const double a = params.weights[i];
    if (a == 0.0) continue;
    const double mean = e.time + w * params.delays[i];
    const double sd = w * std::sqrt(params.widths[i]);
    // Difference of erfc values keeps precision in both tails.
    const double z0 = (t0 - mean) / (sd * std::numbers::sqrt2);
    const double z1 = (t1 - mean) / (sd * std::numbers::sqrt2);
    double mass;
    if (z0 > 0.0)
      mass = 0.5 * (std::erfc(z0) - std::erfc(z1));
    else
      mass = 0.5 * (std::erfc(-z1) - std::erfc(-z0));
    total += e.amplitude * a * mass;
  }
  return total;
}

IntensityEvaluator::IntensityEvaluator(std::span<const LatentEvent> events,
                                       const GlobalParams& params, const WarpGrid& grid)
    : sorted_(events.begin(), events.end()), params_(params), grid_(grid) {
  std::sort(sorted_.begin(), sorted_.end(),
            [](const LatentEvent& a, const LatentEvent& b) { return a.time < b.time; });
  times_.reserve(sorted_.size());
  for (const auto& e : sorted_) times_.push_back(e.time);
  double max_warp = 0.0;
  for (double w : grid.values) max_warp = std::max(max_warp, w);
  for (std::size_t i = 0; i < params.delays.size(); ++i)
    reach_ = std::max(reach_, max_warp * (std::abs(params.delays[i]) +
                                          kUnderflowSd * std::sqrt(params.widths[i])));
}

double IntensityEvaluator::intensity(const Spike& spike) const {
  double rate = params_.bg_rates[spike.neuron];
  auto lo = std::lower_bound(times_.begin(), times_.end(), spike.time - reach_);
  auto hi = std::upper_bound(times_.begin(), times_.end(), spike.time + reach_);
  for (auto it = lo; it != hi; ++it)
    rate += response(spike.time, spike.neuron, sorted_[it - times_.begin()], params_, grid_);
  return rate;
}

double IntensityEvaluator::log_intensity(const Spike& spike) const {
  const double rate = intensity(spike);
  if (!(rate > 0.0))
    throw std::domain_error("log_likelihood: zero intensity at a spike on neuron " +
                            std::to_string(spike.neuron + 1) + " at t=" +
                            std::to_string(spike.time));
  return std::log(rate);
}

double IntensityEvaluator::sum_log_intensity(std::span<const Spike> spikes) const {
  double total = 0.0;
  for (const auto& s : spikes) total += log_intensity(s);
  return total;
}

double log_likelihood(const Dataset& data, std::span<const LatentEvent> events,
                      const GlobalParams& params, const WarpGrid& grid) {
  IntensityEvaluator eval(events, params, grid);
  double ll = eval.sum_log_intensity(data.spikes);
  ll -= params.total_bg_rate() * data.duration;
  for (const auto& e : events) ll -= e.amplitude;
  return ll;
}

}  // namespace ppseq
