#include "ppseq/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ppseq/numeric.hpp"

namespace ppseq {

double Rng::uniform() {
  // 53 random bits, offset by half a unit so the result is never 0 or 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::index: empty range");
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
}

double Rng::normal(double mean, double sd) {
  return std::normal_distribution<double>(mean, sd)(engine_);
}

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw std::invalid_argument("Rng::gamma: bad parameters");
  return std::gamma_distribution<double>(shape, 1.0 / rate)(engine_);
}

double Rng::log_gamma_variate(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("Rng::log_gamma_variate: bad shape");
  if (shape >= 1.0) return std::log(std::gamma_distribution<double>(shape, 1.0)(engine_));
  // G(a) = G(a + 1) * U^(1/a)
  const double g = std::gamma_distribution<double>(shape + 1.0, 1.0)(engine_);
  return std::log(g) + std::log(uniform()) / shape;
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw std::invalid_argument("Rng::poisson: bad mean");
  if (mean == 0.0) return 0;
  return std::poisson_distribution<std::uint64_t>(mean)(engine_);
}

double Rng::scaled_inv_chi2(double dof, double scale) {
  const double chi2 = 2.0 * gamma(0.5 * dof, 1.0);
  return dof * scale / chi2;
}

std::vector<double> Rng::dirichlet(std::span<const double> concentration) {
  std::vector<double> out(concentration.size());
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = log_gamma_variate(concentration[i]);
    mx = std::max(mx, out[i]);
  }
  double total = 0.0;
  for (double& v : out) {
    v = std::exp(v - mx);
    total += v;
  }
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> Rng::dirichlet(std::size_t dim, double concentration) {
  std::vector<double> c(dim, concentration);
  return dirichlet(c);
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw std::domain_error("Rng::categorical: weights sum to zero");
  double u = uniform() * total;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = i;
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return last;
}

std::size_t Rng::categorical_log(std::span<const double> log_weights) {
  const double mx = *std::max_element(log_weights.begin(), log_weights.end());
  if (mx == -std::numeric_limits<double>::infinity() || std::isnan(mx))
    throw std::domain_error("Rng::categorical_log: no finite weight");
  scratch_.resize(log_weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    total += std::exp(log_weights[i] - mx);
    scratch_[i] = total;
  }
  const double u = uniform() * total;
  auto it = std::upper_bound(scratch_.begin(), scratch_.end(), u);
  std::size_t i = static_cast<std::size_t>(it - scratch_.begin());
  if (i >= log_weights.size()) i = log_weights.size() - 1;
  // Rounding can land on a trailing zero-width entry; step back to a live one.
  while (log_weights[i] == -std::numeric_limits<double>::infinity()) --i;
  return i;
}

std::string Rng::save_state() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::load_state(const std::string& state) {
  std::istringstream is(state);
  is >> engine_;
  if (!is) throw std::invalid_argument("Rng::load_state: malformed engine state");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master) ^ (stream + 0x632be59bd9b4e019ULL));
}

}  // namespace ppseq
