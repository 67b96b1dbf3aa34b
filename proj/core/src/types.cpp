#include "ppseq/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ppseq {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void Hyperparams::validate() const {
  require(num_neurons >= 1, "hyperparams: num_neurons must be >= 1");
  require(num_types >= 1, "hyperparams: num_types must be >= 1");
  require(positive(duration), "hyperparams: duration must be positive");
  require(std::isfinite(event_rate) && event_rate >= 0.0,
          "hyperparams: event_rate must be non-negative");
  require(positive(amplitude_shape), "hyperparams: amplitude_shape must be positive");
  require(positive(amplitude_rate), "hyperparams: amplitude_rate must be positive");
  require(positive(type_concentration), "hyperparams: type_concentration must be positive");
  require(positive(weight_concentration), "hyperparams: weight_concentration must be positive");
  require(positive(width_dof), "hyperparams: width_dof must be positive");
  require(positive(width_scale), "hyperparams: width_scale must be positive");
  require(positive(delay_precision), "hyperparams: delay_precision must be positive");
  require(positive(bg_shape), "hyperparams: bg_shape must be positive");
  require(positive(bg_rate), "hyperparams: bg_rate must be positive");
  require(positive(bg_concentration), "hyperparams: bg_concentration must be positive");
  require(num_warps >= 1, "hyperparams: num_warps must be >= 1");
  require(std::isfinite(max_warp) && max_warp >= 1.0, "hyperparams: max_warp must be >= 1");
  require(positive(warp_variance), "hyperparams: warp_variance must be positive");
  require(split_merge_window > 0.0, "hyperparams: split_merge_window must be positive");
}

GlobalParams::GlobalParams(int neurons, int types)
    : num_neurons(neurons),
      num_types(types),
      bg_rates(static_cast<std::size_t>(neurons), 0.0),
      type_probs(static_cast<std::size_t>(types), 1.0 / types),
      weights(static_cast<std::size_t>(neurons) * types, 1.0 / neurons),
      delays(static_cast<std::size_t>(neurons) * types, 0.0),
      widths(static_cast<std::size_t>(neurons) * types, 1.0) {}

double GlobalParams::total_bg_rate() const {
  return std::accumulate(bg_rates.begin(), bg_rates.end(), 0.0);
}

void GlobalParams::validate(double tolerance) const {
  const auto nr = static_cast<std::size_t>(num_neurons) * static_cast<std::size_t>(num_types);
  require(num_neurons >= 1 && num_types >= 1, "params: empty dimensions");
  require(bg_rates.size() == static_cast<std::size_t>(num_neurons), "params: bg_rates size");
  require(type_probs.size() == static_cast<std::size_t>(num_types), "params: type_probs size");
  require(weights.size() == nr && delays.size() == nr && widths.size() == nr,
          "params: per-neuron array size");
  for (double l : bg_rates) require(std::isfinite(l) && l >= 0.0, "params: negative bg rate");
  double total = 0.0;
  for (double p : type_probs) {
    require(p >= 0.0, "params: negative type probability");
    total += p;
  }
  require(std::abs(total - 1.0) <= tolerance, "params: type_probs must sum to 1");
  for (int r = 0; r < num_types; ++r) {
    double sum = 0.0;
    for (int n = 0; n < num_neurons; ++n) {
      require(weight(n, r) >= 0.0, "params: negative neuron weight");
      sum += weight(n, r);
    }
    require(std::abs(sum - 1.0) <= tolerance, "params: neuron weights must sum to 1");
  }
  for (double c : widths) require(positive(c), "params: widths must be positive");
  for (double b : delays) require(std::isfinite(b), "params: delays must be finite");
}

void sort_canonical(std::vector<Spike>& spikes) {
  std::stable_sort(spikes.begin(), spikes.end(), [](const Spike& a, const Spike& b) {
    return a.time < b.time || (a.time == b.time && a.neuron < b.neuron);
  });
}

Dataset::Dataset(int neurons, double dur, std::vector<Spike> s)
    : num_neurons(neurons), duration(dur), spikes(std::move(s)) {
  sort_canonical(spikes);
  validate();
}

void Dataset::validate() const {
  require(num_neurons >= 1, "dataset: num_neurons must be >= 1");
  require(positive(duration), "dataset: duration must be positive");
  for (std::size_t i = 0; i < spikes.size(); ++i) {
    const Spike& s = spikes[i];
    if (s.neuron < 0 || s.neuron >= num_neurons)
      throw std::invalid_argument("dataset: spike " + std::to_string(i) +
                                  " has neuron id out of range");
    if (!(s.time >= 0.0 && s.time <= duration))
      throw std::invalid_argument("dataset: spike " + std::to_string(i) +
                                  " has time outside [0, duration]");
    if (i > 0 && s.time < spikes[i - 1].time)
      throw std::invalid_argument("dataset: spikes are not sorted by time");
  }
}

}  // namespace ppseq
