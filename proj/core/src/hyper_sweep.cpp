#include "ppseq/hyper_sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace ppseq {

void SearchSpace::validate() const {
  for (const auto& d : dimensions) {
    if (d.name.empty()) throw std::invalid_argument("search space: unnamed dimension");
    if (d.kind == DimensionKind::fixed) continue;
    if (!(d.low <= d.high)) throw std::invalid_argument("search space: low > high for " + d.name);
    if (d.kind == DimensionKind::log_uniform && !(d.low > 0.0))
      throw std::invalid_argument("search space: log-uniform range must be positive for " + d.name);
  }
}

SearchPoint sample_point(const SearchSpace& space, Rng& rng) {
  SearchPoint p;
  for (const auto& d : space.dimensions) {
    double v = d.low;
    switch (d.kind) {
      case DimensionKind::uniform:
        v = rng.uniform(d.low, d.high);
        break;
      case DimensionKind::log_uniform:
        v = std::exp(rng.uniform(std::log(d.low), std::log(d.high)));
        break;
      case DimensionKind::int_uniform: {
        const auto lo = static_cast<long>(std::ceil(d.low));
        const auto hi = static_cast<long>(std::floor(d.high));
        v = static_cast<double>(lo + static_cast<long>(rng.index(static_cast<std::uint64_t>(hi - lo + 1))));
        break;
      }
      case DimensionKind::fixed:
        break;
    }
    p[d.name] = v;
  }
  return p;
}

ChainConfig apply_point(const ChainConfig& base, const SearchPoint& point, int num_neurons) {
  ChainConfig c = base;
  auto& h = c.hyper;
  for (const auto& [name, v] : point) {
    if (name == "R" || name == "num_types") h.num_types = static_cast<int>(std::lround(v));
    else if (name == "max_warp") h.max_warp = v;
    else if (name == "amplitude_mean") { h.amplitude_shape = v; h.amplitude_rate = 1.0; }
    else if (name == "bg_rate_mean") { h.bg_shape = v / num_neurons; h.bg_rate = 1.0; }
    else if (name == "psi" || name == "event_rate") h.event_rate = v;
    else if (name == "width" || name == "width_scale") h.width_scale = v;
    else if (name == "amplitude_shape") h.amplitude_shape = v;
    else if (name == "amplitude_rate") h.amplitude_rate = v;
    else if (name == "type_concentration") h.type_concentration = v;
    else if (name == "weight_concentration") h.weight_concentration = v;
    else if (name == "width_dof") h.width_dof = v;
    else if (name == "delay_precision") h.delay_precision = v;
    else if (name == "bg_shape") h.bg_shape = v;
    else if (name == "bg_rate") h.bg_rate = v;
    else if (name == "num_warps") h.num_warps = static_cast<int>(std::lround(v));
    else if (name == "warp_variance") h.warp_variance = v;
    else if (name == "split_merge_window") h.split_merge_window = v;
    else throw std::invalid_argument("search space: unknown dimension '" + name + "'");
  }
  return c;
}

std::vector<SweepRow> hyperparameter_sweep(const Dataset& data, const ChainConfig& base,
                                           const SearchSpace& space, int num_configs,
                                           std::uint64_t seed, int concurrent) {
  space.validate();
  if (num_configs < 0) throw std::invalid_argument("sweep: num_configs must be >= 0");
  if (!(base.mask_fraction > 0.0))
    throw std::invalid_argument("sweep: a positive mask_fraction is required for validation");

  // All points are drawn up front so results do not depend on scheduling.
  Rng rng(seed);
  std::vector<SweepRow> rows(static_cast<std::size_t>(num_configs));
  for (int i = 0; i < num_configs; ++i) {
    rows[i].index = i;
    rows[i].seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    rows[i].point = sample_point(space, rng);
  }

  auto fit = [&](SweepRow& row) {
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto cfg = apply_point(base, row.point, data.num_neurons);
      Rng mask_rng(derive_seed(row.seed, kMaskStream));
      const auto mask = make_speckled_mask(data, cfg.mask_fraction, cfg.mask_block_length, mask_rng);
      const auto summary = run_chain(data, cfg, mask, row.seed);
      row.train_log_likelihood = summary.samples.back().train_log_likelihood;
      row.validation_score = summary.heldout.value().excess_nats_per_second;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    row.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const int workers = std::max(1, std::min(concurrent, num_configs));
  std::atomic<int> next{0};
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next++; i < num_configs; i = next++) fit(rows[i]);
      });
  }

  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.error.has_value() != b.error.has_value()) return !a.error.has_value();
    if (a.error) return a.index < b.index;
    if (a.validation_score != b.validation_score) return a.validation_score > b.validation_score;
    return a.index < b.index;
  });
  return rows;
}

}  // namespace ppseq
