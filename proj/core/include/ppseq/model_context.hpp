#pragma once

#include <vector>

#include "ppseq/numeric.hpp"
#include "ppseq/types.hpp"
#include "ppseq/warp_grid.hpp"

namespace ppseq {

/// Per-neuron tables derived from the current global parameters, shared by all
/// clusters of a chain. A hypothesis h = r * F + f pairs a sequence type with a
/// warp index. For a spike on neuron n under h the impulse response has
/// precision 1 / (w_f^2 c_nr), mean offset w_f b_nr and weight a_nr.
class ModelContext {
 public:
  ModelContext(const Hyperparams& hyper, const WarpGrid& grid);

  void set_params(const GlobalParams& params);
  /// Replaces the amplitude prior used by the sampler (annealing).
  void set_amplitude_prior(double shape, double rate);

  const Hyperparams& hyper() const { return hyper_; }
  const WarpGrid& grid() const { return grid_; }
  const GlobalParams& params() const { return params_; }
  double amplitude_shape() const { return amp_shape_; }
  double amplitude_rate() const { return amp_rate_; }

  int num_neurons() const { return n_; }
  int num_types() const { return r_; }
  int num_warps() const { return f_; }
  int num_hypotheses() const { return h_; }
  int type_of(int h) const { return h / f_; }
  int warp_of(int h) const { return h % f_; }

  std::size_t slot(int neuron, int h) const {
    return static_cast<std::size_t>(neuron) * static_cast<std::size_t>(h_) + h;
  }
  double precision(std::size_t i) const { return precision_[i]; }
  double half_log_precision(std::size_t i) const { return half_log_precision_[i]; }
  double offset(std::size_t i) const { return offset_[i]; }
  /// log a_nr; -inf when the weight is exactly zero.
  double log_weight(std::size_t i) const { return log_weight_[i]; }
  /// log pi_r + log eta_f.
  double log_prior(int h) const { return log_prior_[h]; }

  /// log[(1 + beta) lambda_n]: unnormalised weight of joining the background.
  double log_background_weight(int neuron) const { return log_bg_[neuron]; }
  /// log[alpha (beta / (1 + beta))^alpha psi sum_r pi_r a_nr]: weight of
  /// opening a new cluster.
  double log_new_cluster_weight(int neuron) const { return log_new_[neuron]; }

  /// log (beta / (1 + beta))^alpha, the probability that an event emits nothing.
  double log_empty_prob() const { return log_q_; }
  double log_duration() const { return log_duration_; }

  /// Memoised log V(K*); see partition.hpp.
  double log_V(int num_clusters) const;

 private:
  void refresh_weights();

  Hyperparams hyper_;
  WarpGrid grid_;
  GlobalParams params_;
  int n_, r_, f_, h_;
  double amp_shape_, amp_rate_;
  double log_q_ = 0.0;
  double log_duration_;

  std::vector<double> precision_;
  std::vector<double> half_log_precision_;
  std::vector<double> offset_;
  std::vector<double> log_weight_;
  std::vector<double> log_prior_;
  std::vector<double> log_bg_;
  std::vector<double> log_new_;
  mutable std::vector<double> log_v_cache_;
};

}  // namespace ppseq
