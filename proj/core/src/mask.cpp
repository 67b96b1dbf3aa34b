#include "ppseq/mask.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "ppseq/model.hpp"

namespace ppseq {

SpeckledMask::SpeckledMask(int num_neurons, double duration, std::vector<TimeBlock> blocks)
    : num_neurons_(num_neurons), duration_(duration), blocks_(std::move(blocks)) {
  std::sort(blocks_.begin(), blocks_.end(), [](const TimeBlock& a, const TimeBlock& b) {
    return a.neuron < b.neuron || (a.neuron == b.neuron && a.start < b.start);
  });
  first_.assign(static_cast<std::size_t>(num_neurons) + 1, 0);
  per_neuron_.assign(static_cast<std::size_t>(num_neurons), 0.0);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    if (b.neuron < 0 || b.neuron >= num_neurons || b.start < 0.0 || b.end > duration ||
        !(b.start < b.end))
      throw std::invalid_argument("mask: block outside the recording");
    if (i > 0 && blocks_[i - 1].neuron == b.neuron && blocks_[i - 1].end > b.start)
      throw std::invalid_argument("mask: overlapping blocks");
    per_neuron_[b.neuron] += b.end - b.start;
  }
  for (int n = 0, i = 0; n <= num_neurons; ++n) {
    while (i < static_cast<int>(blocks_.size()) && blocks_[i].neuron < n) ++i;
    first_[n] = static_cast<std::size_t>(i);
  }
}

bool SpeckledMask::contains(const Spike& spike) const {
  if (blocks_.empty()) return false;
  const auto lo = blocks_.begin() + static_cast<std::ptrdiff_t>(first_[spike.neuron]);
  const auto hi = blocks_.begin() + static_cast<std::ptrdiff_t>(first_[spike.neuron + 1]);
  auto it = std::upper_bound(lo, hi, spike.time,
                             [](double t, const TimeBlock& b) { return t < b.start; });
  if (it == lo) return false;
  --it;
  return spike.time < it->end;
}

double SpeckledMask::total_area() const {
  return std::accumulate(per_neuron_.begin(), per_neuron_.end(), 0.0);
}

SpeckledMask make_speckled_mask(const Dataset& data, double fraction, double block_length,
                                Rng& rng) {
  if (!(fraction >= 0.0 && fraction < 1.0))
    throw std::invalid_argument("mask: fraction must lie in [0, 1)");
  if (!(block_length > 0.0)) throw std::invalid_argument("mask: block_length must be positive");
  const int N = data.num_neurons;
  const double T = data.duration;
  const auto per = static_cast<std::size_t>(std::ceil(T / block_length - 1e-9));
  const std::size_t total = per * static_cast<std::size_t>(N);
  const auto chosen = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));

  // Partial Fisher-Yates over block ids.
  std::vector<std::size_t> ids(total);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  for (std::size_t i = 0; i < chosen; ++i) std::swap(ids[i], ids[i + rng.index(total - i)]);

  std::vector<TimeBlock> blocks;
  blocks.reserve(chosen);
  for (std::size_t i = 0; i < chosen; ++i) {
    const int n = static_cast<int>(ids[i] / per);
    const auto j = static_cast<double>(ids[i] % per);
    blocks.push_back({n, j * block_length, std::min((j + 1.0) * block_length, T)});
  }
  return SpeckledMask(N, T, std::move(blocks));
}

MaskedSplit split_by_mask(const Dataset& data, const SpeckledMask& mask) {
  MaskedSplit out;
  for (std::size_t i = 0; i < data.spikes.size(); ++i) {
    const auto& s = data.spikes[i];
    if (mask.contains(s)) {
      out.test.push_back(s);
      out.test_index.push_back(i);
    } else {
      out.train.push_back(s);
      out.train_index.push_back(i);
    }
  }
  return out;
}

namespace {

// Standard normal draw conditioned on [z0, z1], by inverting the CDF on the
// side of zero that keeps the tail probabilities representable.
double truncated_standard_normal(double z0, double z1, Rng& rng) {
  using boost::math::erfc;
  using boost::math::erfc_inv;
  const double s = std::numbers::sqrt2;
  if (z0 >= 0.0) {
    const double q0 = erfc(z0 / s);  // 2 * upper tail
    const double q1 = erfc(z1 / s);
    const double u = q1 + (q0 - q1) * rng.uniform();
    return s * erfc_inv(u);
  }
  if (z1 <= 0.0) {
    const double p0 = erfc(-z0 / s);
    const double p1 = erfc(-z1 / s);
    const double u = p0 + (p1 - p0) * rng.uniform();
    return -s * erfc_inv(u);
  }
  const double p0 = 0.5 * erfc(-z0 / s);
  const double p1 = 0.5 * erfc(-z1 / s);
  const double u = p0 + (p1 - p0) * rng.uniform();
  return -s * erfc_inv(2.0 * u);
}

}  // namespace

std::vector<Spike> impute_masked_spikes(std::span<const LatentEvent> events,
                                        const GlobalParams& params, const WarpGrid& grid,
                                        const SpeckledMask& mask, Rng& rng,
                                        std::vector<int>* parents) {
  std::vector<Spike> out;
  if (parents) parents->clear();
  for (const auto& b : mask.blocks()) {
    const double len = b.end - b.start;
    const auto bg = rng.poisson(params.bg_rates[b.neuron] * len);
    for (std::uint64_t i = 0; i < bg; ++i) {
      out.push_back({b.neuron, rng.uniform(b.start, b.end)});
      if (parents) parents->push_back(0);
    }
    for (std::size_t k = 0; k < events.size(); ++k) {
      const auto& e = events[k];
      const double a = params.weight(b.neuron, e.type);
      if (a == 0.0) continue;
      const double w = grid.values[e.warp];
      const double mean = e.time + w * params.delay(b.neuron, e.type);
      const double sd = w * std::sqrt(params.width(b.neuron, e.type));
      const double z0 = (b.start - mean) / sd;
      const double z1 = (b.end - mean) / sd;
      if (z0 > 40.0 || z1 < -40.0) continue;
      const double mass = integrated_event_intensity(b.neuron, b.start, b.end,
                                                     std::span(&e, 1), params, grid);
      const auto count = rng.poisson(mass);
      for (std::uint64_t i = 0; i < count; ++i) {
        const double t = std::clamp(mean + sd * truncated_standard_normal(z0, z1, rng), b.start,
                                    std::nextafter(b.end, b.start));
        out.push_back({b.neuron, t});
        if (parents) parents->push_back(static_cast<int>(k) + 1);
      }
    }
  }
  return out;
}

double masked_intensity_integral(std::span<const LatentEvent> events, const GlobalParams& params,
                                 const WarpGrid& grid, const SpeckledMask& mask) {
  double total = 0.0;
  for (const auto& b : mask.blocks())
    total += params.bg_rates[b.neuron] * (b.end - b.start) +
             integrated_event_intensity(b.neuron, b.start, b.end, events, params, grid);
  return total;
}

}  // namespace ppseq
