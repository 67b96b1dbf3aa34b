#include <csignal>
#include <iostream>

#include "cli.hpp"

namespace {

extern "C" void on_interrupt(int) {
  ppseq::cli::stop_flag().store(true);
  // A second Ctrl-C terminates immediately.
  std::signal(SIGINT, SIG_DFL);
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);
  return ppseq::cli::cli_main(argc, argv, std::cout, std::cerr);
}
