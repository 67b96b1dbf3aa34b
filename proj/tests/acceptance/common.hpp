#pragma once

#include <chrono>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ppseq/driver.hpp"
#include "ppseq/mask.hpp"
#include "ppseq/types.hpp"
#include "ppseq/warp_grid.hpp"

namespace acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome ac1_oracles();
Outcome ac2_exact_posterior();
Outcome ac3_geweke();
Outcome ac4_model_selection();
Outcome ac5_detection();
Outcome ac6_time_warp();
Outcome ac7_performance();
Outcome ac8_parallel();
Outcome ac9_multi_chain();

template <class... Args>
std::string cat(const Args&... args) {
  std::ostringstream os;
  os.precision(4);
  (os << ... << args);
  return os.str();
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Discards std::clog output (simulation warnings) while in scope.
class QuietLog {
 public:
  QuietLog() : saved_(std::clog.rdbuf(nullptr)) {}
  ~QuietLog() { std::clog.rdbuf(saved_); }
  QuietLog(const QuietLog&) = delete;
  QuietLog& operator=(const QuietLog&) = delete;

 private:
  std::streambuf* saved_;
};

/// Progress line on stderr so long criteria show signs of life under ctest.
void note(const std::string& line);

/// Speckled mask drawn from its own stream, then `chains` independent chains
/// on the rest. The chain with the highest mean retained training log
/// likelihood is kept; held-out data play no part in the choice.
struct MaskedFit {
  ppseq::SpeckledMask mask;
  ppseq::PosteriorSummary summary;
  double seconds = 0.0;
};
MaskedFit fit_masked(const ppseq::Dataset& data, const ppseq::ChainConfig& config,
                     std::uint64_t seed, int chains = 1);

/// Number of distinct positive parent labels.
int nonempty_events(const std::vector<int>& parents);

}  // namespace acceptance
