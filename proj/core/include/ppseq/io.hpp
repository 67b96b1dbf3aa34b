#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ppseq/driver.hpp"
#include "ppseq/eval.hpp"
#include "ppseq/generative.hpp"
#include "ppseq/hyper_sweep.hpp"
#include "ppseq/mask.hpp"
#include "ppseq/types.hpp"

namespace ppseq {

inline constexpr int kFileFormatVersion = 1;

/// Malformed input files. The message names the file and line where possible.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a `neuron,time` CSV with one-based neuron ids. Lines starting with
/// '#' and blank lines are skipped. Missing N or T are inferred (N = largest
/// id, T = largest time rounded up) and the inference is logged to std::clog.
Dataset parse_spikes(std::istream& in, const std::string& name,
                     std::optional<int> num_neurons = std::nullopt,
                     std::optional<double> duration = std::nullopt);
Dataset parse_spikes(const std::string& path, std::optional<int> num_neurons = std::nullopt,
                     std::optional<double> duration = std::nullopt);

/// Writes spikes as CSV. `provenance` (if non-empty) is emitted as a leading
/// '#' comment line.
void write_spikes(std::ostream& out, const Dataset& data, const std::string& provenance = {});

/// Everything the CLI reads from a JSON config file.
struct RunConfig {
  ChainConfig chain;
  std::uint64_t seed = 1;
  int chains = 1;
  std::string data_path;
  /// Set only when the config names them; otherwise inferred from the data.
  std::optional<int> num_neurons;
  std::optional<double> duration;
  std::optional<std::pair<std::size_t, std::size_t>> co_occupancy;

  double bin_size = 0.2;
  int max_shift = 20;

  SearchSpace search;
  int num_configs = 0;

  /// Forward-simulation overrides: when set, every neuron/type uses these
  /// values instead of prior draws.
  std::optional<double> fixed_bg_rate;
  std::optional<double> fixed_width;
};

/// Throws ConfigError with the offending key on malformed input.
RunConfig parse_run_config(const std::string& json_text);
RunConfig read_run_config(const std::string& path);
std::string run_config_to_json(const RunConfig& config);

/// Provenance header used by every output: format name, version, seed and the
/// resolved configuration, as a one-line JSON object.
std::string provenance(const std::string& format, const RunConfig& config, std::uint64_t seed);

void write_truth(std::ostream& out, const Simulation& sim, const std::string& provenance);
GroundTruth read_truth(const std::string& path);

/// JSON lines: the provenance object, then one sample per line with events
/// (time, one-based type, amplitude, one-based warp), run-length encoded
/// assignments [[label, count], ...] and the global parameters.
void write_samples(std::ostream& out, const PosteriorSummary& summary,
                   const std::string& provenance);
std::vector<PosteriorSample> read_samples(const std::string& path, std::string* header = nullptr);

/// Mask blocks as `neuron,start,end` rows with one-based neuron ids.
void write_mask_csv(std::ostream& out, const SpeckledMask& mask, const std::string& provenance);
SpeckledMask read_mask_csv(const std::string& path, int num_neurons, double duration);

void write_trace_csv(std::ostream& out, const PosteriorSummary& summary,
                     const std::string& provenance);
void write_k_histogram_csv(std::ostream& out, const PosteriorSummary& summary,
                           const std::string& provenance);
void write_roc_csv(std::ostream& out, std::span<const RocPoint> curve, const std::string& provenance);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const std::string& provenance);
void write_co_occupancy_csv(std::ostream& out, const std::vector<double>& matrix, std::size_t first,
                            std::size_t size, const std::string& provenance);

/// Fit summary: held-out score, split-merge counts, sample count per chain.
void write_fit_report(std::ostream& out, const std::vector<PosteriorSummary>& chains,
                      const std::string& provenance);

}  // namespace ppseq
