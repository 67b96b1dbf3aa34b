#pragma once

#include <vector>

#include "ppseq/model_context.hpp"
#include "ppseq/types.hpp"

namespace ppseq {

/// Sufficient statistics of one cluster, kept per hypothesis (type, warp) in
/// information form. Times are stored relative to a fixed anchor so the sums
/// stay well conditioned for long recordings.
class ClusterStats {
 public:
  void reset(double anchor, int num_hypotheses);

  void add(const Spike& spike, const ModelContext& ctx);
  void remove(const Spike& spike, const ModelContext& ctx);
  /// Recomputes the cached per-hypothesis posteriors after add/remove.
  void refresh(const ModelContext& ctx);

  /// log p(spike | members), marginalising the latent event.
  double log_predictive(const Spike& spike, const ModelContext& ctx) const;

  int size() const { return size_; }
  double anchor() const { return anchor_; }
  /// Mean member time.
  double center() const { return size_ > 0 ? anchor_ + sum_time_ / size_ : anchor_; }
  int num_hypotheses() const { return static_cast<int>(sum_precision_.size()); }

  double sum_precision(int h) const { return sum_precision_[h]; }
  /// Sum of J_s (t_s - anchor - offset); add anchor * sum_precision for absolute time.
  double sum_linear(int h) const { return sum_linear_[h]; }
  double sum_log_z(int h) const { return sum_log_z_[h]; }
  double sum_log_weight(int h) const { return sum_log_weight_[h]; }
  int zero_weight_count(int h) const { return zero_weights_[h]; }

  /// log[pi_r eta_f prod a Z(sum J, sum h) / prod Z(J_s, h_s)] per hypothesis.
  double log_posterior(int h) const { return log_post_[h]; }
  /// log sum_h of the above.
  double log_evidence() const { return log_evidence_; }
  /// log_evidence - log T: the cluster marginal likelihood.
  double log_marginal(const ModelContext& ctx) const { return log_evidence_ - ctx.log_duration(); }

 private:
  double anchor_ = 0.0;
  int size_ = 0;
  double sum_time_ = 0.0;
  std::vector<double> sum_precision_;
  std::vector<double> sum_linear_;
  std::vector<double> sum_log_z_;
  std::vector<double> sum_log_weight_;
  std::vector<int> zero_weights_;
  std::vector<double> log_z_;
  std::vector<double> log_post_;
  double log_evidence_ = kNegInf;
};

}  // namespace ppseq
