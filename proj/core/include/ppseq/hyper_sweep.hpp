#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppseq/driver.hpp"
#include "ppseq/random.hpp"

namespace ppseq {

enum class DimensionKind { uniform, log_uniform, int_uniform, fixed };

/// One searched quantity. Names are either Hyperparams fields (for example
/// "event_rate") or one of the shorthands:
///   R               number of sequence types (integer)
///   max_warp        largest warp factor
///   amplitude_mean  mean sequence amplitude m; sets shape = m, rate = 1 so
///                   the amplitude variance equals its mean
///   bg_rate_mean    mean total background rate m; sets per-neuron
///                   shape = m / N and rate = 1
///   psi             sequence event rate
///   width           prior width scale
struct Dimension {
  std::string name;
  DimensionKind kind = DimensionKind::uniform;
  double low = 0.0;
  double high = 0.0;
};

struct SearchSpace {
  std::vector<Dimension> dimensions;
  void validate() const;
};

using SearchPoint = std::map<std::string, double>;

SearchPoint sample_point(const SearchSpace& space, Rng& rng);
/// Returns a copy of `base` with the point applied.
ChainConfig apply_point(const ChainConfig& base, const SearchPoint& point, int num_neurons);

struct SweepRow {
  int index = 0;
  std::uint64_t seed = 0;
  SearchPoint point;
  double train_log_likelihood = 0.0;
  double validation_score = 0.0;
  double runtime_seconds = 0.0;
  std::optional<std::string> error;
};

/// Independent masked fits for `num_configs` sampled points. Configuration i
/// runs its chain from seed derive_seed(seed, i) and draws its mask from
/// derive_seed of that seed and kMaskStream. Failures are
/// recorded in the row. Rows are ranked by validation score, best first, ties
/// by index; failed rows go last.
std::vector<SweepRow> hyperparameter_sweep(const Dataset& data, const ChainConfig& base,
                                           const SearchSpace& space, int num_configs,
                                           std::uint64_t seed, int concurrent = 1);

}  // namespace ppseq
