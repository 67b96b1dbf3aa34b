#include "ppseq/cluster_stats.hpp"

#include <cmath>

namespace ppseq {

void ClusterStats::reset(double anchor, int num_hypotheses) {
  const auto h = static_cast<std::size_t>(num_hypotheses);
  anchor_ = anchor;
  size_ = 0;
  sum_time_ = 0.0;
  sum_precision_.assign(h, 0.0);
  sum_linear_.assign(h, 0.0);
  sum_log_z_.assign(h, 0.0);
  sum_log_weight_.assign(h, 0.0);
  zero_weights_.assign(h, 0);
  log_z_.assign(h, 0.0);
  log_post_.assign(h, kNegInf);
  log_evidence_ = kNegInf;
}

void ClusterStats::add(const Spike& spike, const ModelContext& ctx) {
  const double x0 = spike.time - anchor_;
  const int H = num_hypotheses();
  for (int h = 0; h < H; ++h) {
    const std::size_t i = ctx.slot(spike.neuron, h);
    const double J = ctx.precision(i);
    const double x = x0 - ctx.offset(i);
    const double lin = x * J;
    sum_precision_[h] += J;
    sum_linear_[h] += lin;
    sum_log_z_[h] += kHalfLog2Pi - ctx.half_log_precision(i) + 0.5 * x * lin;
    const double la = ctx.log_weight(i);
    if (la == kNegInf)
      ++zero_weights_[h];
    else
      sum_log_weight_[h] += la;
  }
  ++size_;
  sum_time_ += x0;
}

void ClusterStats::remove(const Spike& spike, const ModelContext& ctx) {
  --size_;
  if (size_ == 0) {
    reset(anchor_, num_hypotheses());
    return;
  }
  const double x0 = spike.time - anchor_;
  const int H = num_hypotheses();
  for (int h = 0; h < H; ++h) {
    const std::size_t i = ctx.slot(spike.neuron, h);
    const double J = ctx.precision(i);
    const double x = x0 - ctx.offset(i);
    const double lin = x * J;
    sum_precision_[h] -= J;
    sum_linear_[h] -= lin;
    sum_log_z_[h] -= kHalfLog2Pi - ctx.half_log_precision(i) + 0.5 * x * lin;
    const double la = ctx.log_weight(i);
    if (la == kNegInf)
      --zero_weights_[h];
    else
      sum_log_weight_[h] -= la;
  }
  sum_time_ -= x0;
}

void ClusterStats::refresh(const ModelContext& ctx) {
  const int H = num_hypotheses();
  if (size_ == 0) {
    log_evidence_ = kNegInf;
    return;
  }
  double mx = kNegInf;
  for (int h = 0; h < H; ++h) {
    log_z_[h] = log_z_unchecked(sum_precision_[h], sum_linear_[h]);
    log_post_[h] = zero_weights_[h] > 0
                       ? kNegInf
                       : ctx.log_prior(h) + sum_log_weight_[h] + log_z_[h] - sum_log_z_[h];
    if (log_post_[h] > mx) mx = log_post_[h];
  }
  if (mx == kNegInf) {
    log_evidence_ = kNegInf;
    return;
  }
  double s = 0.0;
  for (int h = 0; h < H; ++h) s += std::exp(log_post_[h] - mx);
  log_evidence_ = mx + std::log(s);
}

double ClusterStats::log_predictive(const Spike& spike, const ModelContext& ctx) const {
  if (log_evidence_ == kNegInf) return kNegInf;
  const double x0 = spike.time - anchor_;
  const int H = num_hypotheses();
  // Streaming log-sum-exp over hypotheses.
  double mx = kNegInf;
  double acc = 0.0;
  for (int h = 0; h < H; ++h) {
    if (zero_weights_[h] > 0) continue;
    const std::size_t i = ctx.slot(spike.neuron, h);
    const double la = ctx.log_weight(i);
    if (la == kNegInf) continue;
    const double J = ctx.precision(i);
    const double x = x0 - ctx.offset(i);
    const double lin = x * J;
    const double single = kHalfLog2Pi - ctx.half_log_precision(i) + 0.5 * x * lin;
    const double v = log_post_[h] + la +
                     log_z_unchecked(sum_precision_[h] + J, sum_linear_[h] + lin) - log_z_[h] -
                     single;
    if (v <= mx) {
      acc += std::exp(v - mx);
    } else {
      acc = acc * std::exp(mx - v) + 1.0;
      mx = v;
    }
  }
  if (mx == kNegInf) return kNegInf;
  return mx + std::log(acc) - log_evidence_;
}

}  // namespace ppseq
