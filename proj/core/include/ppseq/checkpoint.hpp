#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppseq/driver.hpp"

namespace ppseq {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Snapshot of a run between sweeps, sufficient to continue it bit-for-bit.
struct ChainCheckpoint {
  static constexpr int kFormatVersion = 1;

  struct Slot {
    bool live = false;
    double anchor = 0.0;
    LatentEvent event;
    std::vector<int> members;
  };
  struct Shard {
    std::vector<Spike> spikes;
    std::size_t num_observed = 0;
    std::vector<int> labels;
    std::vector<Slot> slots;
    std::vector<int> live;
    std::vector<int> free_list;
  };

  int format_version = kFormatVersion;
  std::uint64_t seed = 0;
  int next_sweep = 0;
  std::string master_rng;
  std::vector<std::string> shard_rngs;
  GlobalParams params;
  std::vector<Shard> shards;
  PosteriorSummary summary;
};

std::string serialize_checkpoint(const ChainCheckpoint& checkpoint);
/// Throws CheckpointError on a format-version mismatch or malformed input.
ChainCheckpoint parse_checkpoint(const std::string& text);

void write_checkpoint(const std::string& path, const ChainCheckpoint& checkpoint);
ChainCheckpoint read_checkpoint(const std::string& path);

}  // namespace ppseq
