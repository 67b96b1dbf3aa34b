#include "ppseq/model_context.hpp"

#include <cmath>

#include "ppseq/partition.hpp"

namespace ppseq {

ModelContext::ModelContext(const Hyperparams& hyper, const WarpGrid& grid)
    : hyper_(hyper),
      grid_(grid),
      params_(hyper.num_neurons, hyper.num_types),
      n_(hyper.num_neurons),
      r_(hyper.num_types),
      f_(grid.size()),
      h_(hyper.num_types * grid.size()),
      amp_shape_(hyper.amplitude_shape),
      amp_rate_(hyper.amplitude_rate),
      log_duration_(std::log(hyper.duration)) {
  const std::size_t nh = static_cast<std::size_t>(n_) * h_;
  precision_.resize(nh);
  half_log_precision_.resize(nh);
  offset_.resize(nh);
  log_weight_.resize(nh);
  log_prior_.resize(h_);
  log_bg_.resize(n_);
  log_new_.resize(n_);
  set_amplitude_prior(amp_shape_, amp_rate_);
}

void ModelContext::set_params(const GlobalParams& params) {
  params_ = params;
  for (int n = 0; n < n_; ++n) {
    for (int r = 0; r < r_; ++r) {
      const std::size_t p = params.index(n, r);
      const double a = params.weights[p];
      for (int f = 0; f < f_; ++f) {
        const double w = grid_.values[f];
        const std::size_t i = slot(n, r * f_ + f);
        precision_[i] = 1.0 / (w * w * params.widths[p]);
        half_log_precision_[i] = 0.5 * std::log(precision_[i]);
        offset_[i] = w * params.delays[p];
        log_weight_[i] = a > 0.0 ? std::log(a) : kNegInf;
      }
    }
  }
  for (int r = 0; r < r_; ++r)
    for (int f = 0; f < f_; ++f)
      log_prior_[r * f_ + f] = std::log(params.type_probs[r]) + std::log(grid_.probs[f]);
  refresh_weights();
}

void ModelContext::set_amplitude_prior(double shape, double rate) {
  if (shape == amp_shape_ && rate == amp_rate_ && !log_v_cache_.empty()) return;
  amp_shape_ = shape;
  amp_rate_ = rate;
  log_q_ = shape * (std::log(rate) - std::log1p(rate));
  log_v_cache_.clear();
  refresh_weights();
}

void ModelContext::refresh_weights() {
  const double log_new_const = std::log(amp_shape_) + log_q_ + std::log(hyper_.event_rate);
  const double log_bg_const = std::log1p(amp_rate_);
  for (int n = 0; n < n_; ++n) {
    const double bg = params_.bg_rates[n];
    log_bg_[n] = bg > 0.0 ? log_bg_const + std::log(bg) : kNegInf;
    double mix = 0.0;
    for (int r = 0; r < r_; ++r) mix += params_.type_probs[r] * params_.weight(n, r);
    log_new_[n] = mix > 0.0 ? log_new_const + std::log(mix) : kNegInf;
  }
}

double ModelContext::log_V(int num_clusters) const {
  if (num_clusters < 0) return kNegInf;
  const auto k = static_cast<std::size_t>(num_clusters);
  if (k >= log_v_cache_.size()) {
    const std::size_t old = log_v_cache_.size();
    log_v_cache_.resize(k + 1);
    for (std::size_t i = old; i <= k; ++i)
      log_v_cache_[i] = ppseq::log_V(static_cast<int>(i), hyper_.event_rate * hyper_.duration,
                                     log_q_);
  }
  return log_v_cache_[k];
}

}  // namespace ppseq
