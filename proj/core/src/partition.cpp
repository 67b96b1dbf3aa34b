#include "ppseq/partition.hpp"

#include <cmath>
#include <numeric>

#include "ppseq/cluster_stats.hpp"
#include "ppseq/numeric.hpp"

namespace ppseq {

double log_V(int num_clusters, double mu, double log_q) {
  if (num_clusters < 0) return kNegInf;
  if (mu == 0.0) return num_clusters == 0 ? 0.0 : kNegInf;
  // term(K) = exp(-mu) (mu q)^K / (K - K*)!
  const double log_muq = std::log(mu) + log_q;
  const double stop_after = mu * std::exp(log_q) + 10.0 * std::sqrt(mu);
  const double rel_tol = std::log(1e-16);
  double total = kNegInf;
  for (long k = num_clusters;; ++k) {
    const double term = -mu + static_cast<double>(k) * log_muq -
                        std::lgamma(static_cast<double>(k - num_clusters) + 1.0);
    total = log_add_exp(total, term);
    if (static_cast<double>(k) > stop_after && term - total < rel_tol) break;
  }
  return total;
}

double log_V(int num_clusters, const Hyperparams& hyper) {
  const double log_q = hyper.amplitude_shape *
                       (std::log(hyper.amplitude_rate) - std::log1p(hyper.amplitude_rate));
  return log_V(num_clusters, hyper.event_rate * hyper.duration, log_q);
}

double log_partition_prior(std::size_t bg_size, std::span<const int> cluster_sizes,
                           const Hyperparams& hyper, double total_bg_rate) {
  const double alpha = hyper.amplitude_shape;
  const double s0 = static_cast<double>(bg_size);
  const double s = s0 + std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), 0.0);
  const double mean_bg = total_bg_rate * hyper.duration;

  double lp = log_V(static_cast<int>(cluster_sizes.size()), hyper);
  // Poisson(|I0|; lambda T) * |I0|!
  if (mean_bg > 0.0)
    lp += -mean_bg + s0 * std::log(mean_bg);
  else if (bg_size > 0)
    return kNegInf;
  lp -= std::lgamma(s + 1.0);
  lp -= (s - s0) * std::log1p(hyper.amplitude_rate);
  for (int n : cluster_sizes) lp += std::lgamma(n + alpha) - std::lgamma(alpha);
  return lp;
}

double log_marginal_cluster(std::span<const Spike> cluster, const ModelContext& ctx) {
  if (cluster.empty()) return 0.0;
  ClusterStats stats;
  stats.reset(cluster.front().time, ctx.num_hypotheses());
  for (const auto& s : cluster) stats.add(s, ctx);
  stats.refresh(ctx);
  return stats.log_marginal(ctx);
}

double log_marginal_background(std::span<const Spike> background, const GlobalParams& params,
                               double duration) {
  const double log_total = std::log(params.total_bg_rate()) + std::log(duration);
  double lp = 0.0;
  for (const auto& s : background) lp += std::log(params.bg_rates[s.neuron]) - log_total;
  return lp;
}

}  // namespace ppseq
