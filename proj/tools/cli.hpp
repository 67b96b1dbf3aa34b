#pragma once

#include <atomic>
#include <iosfwd>

namespace ppseq::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kData = 3,
  kCheckpoint = 4,
  kFailure = 5,
  kInterrupted = 130,
};

/// Set from a signal handler; `fit` checkpoints and exits when it flips.
std::atomic<bool>& stop_flag();

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ppseq::cli
