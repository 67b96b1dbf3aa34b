#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace ppseq {

/// Seeded random source shared by every stochastic routine.
///
/// Distribution objects are constructed per draw, so the engine is the only
/// state and save_state()/load_state() capture everything needed to resume.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::mt19937_64& engine() { return engine_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);
  double normal(double mean = 0.0, double sd = 1.0);
  /// Gamma with the given shape and rate (mean shape / rate).
  double gamma(double shape, double rate = 1.0);
  /// log of a Gamma(shape, 1) variate; stable for shapes far below 1.
  double log_gamma_variate(double shape);
  std::uint64_t poisson(double mean);
  bool bernoulli(double p = 0.5) { return uniform() < p; }
  /// Scaled inverse chi-squared draw: dof * scale / chi2(dof).
  double scaled_inv_chi2(double dof, double scale);

  std::vector<double> dirichlet(std::span<const double> concentration);
  std::vector<double> dirichlet(std::size_t dim, double concentration);

  /// Index drawn proportionally to non-negative weights.
  std::size_t categorical(std::span<const double> weights);
  /// Index drawn proportionally to exp(log_weights). Entries equal to -inf are
  /// never chosen. Throws std::domain_error if every entry is -inf.
  std::size_t categorical_log(std::span<const double> log_weights);

  std::string save_state() const;
  void load_state(const std::string& state);

 private:
  std::mt19937_64 engine_;
  std::vector<double> scratch_;
};

/// Seed for an independent stream derived from a master seed (splitmix64 of
/// the pair). Used for chains, shards and sweep configurations.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Stream ids outside the range used for chain and configuration indices.
inline constexpr std::uint64_t kMaskStream = 0x6d61736b;   // speckled-mask draws
inline constexpr std::uint64_t kShardStream = 0x5eed;      // per-shard sampler RNGs

}  // namespace ppseq
