#include "ppseq/anneal.hpp"

#include <cmath>
#include <stdexcept>

namespace ppseq {

void AnnealSchedule::validate() const {
  if (!(initial_temperature >= 1.0)) throw std::invalid_argument("anneal: initial_temperature must be >= 1");
  if (num_stages < 0 || sweeps_per_stage < 0 || final_sweeps < 0)
    throw std::invalid_argument("anneal: sweep counts must be non-negative");
  if (split_merge_moves < 0 || anneal_split_merge_moves < 0)
    throw std::invalid_argument("anneal: split-merge move counts must be non-negative");
  if (retained < 0) throw std::invalid_argument("anneal: retained must be non-negative");
  if (thin < 1) throw std::invalid_argument("anneal: thin must be >= 1");
}

std::pair<double, double> anneal_amplitude_prior(double alpha, double beta, double temperature) {
  if (!(temperature >= 1.0)) throw std::invalid_argument("anneal: temperature must be >= 1");
  return {alpha / temperature, beta / temperature};
}

std::vector<double> temperatures(const AnnealSchedule& schedule) {
  const int stages = schedule.num_stages;
  std::vector<double> temps(static_cast<std::size_t>(stages) + 1);
  for (int j = 0; j < stages; ++j)
    temps[j] = std::pow(schedule.initial_temperature, 1.0 - static_cast<double>(j) / stages);
  temps[stages] = 1.0;
  return temps;
}

double temperature_at(const AnnealSchedule& schedule, int sweep) {
  const int annealing = schedule.num_stages * schedule.sweeps_per_stage;
  if (sweep >= annealing || schedule.sweeps_per_stage == 0) return 1.0;
  const int j = sweep / schedule.sweeps_per_stage;
  return std::pow(schedule.initial_temperature, 1.0 - static_cast<double>(j) / schedule.num_stages);
}

}  // namespace ppseq
