#pragma once

#include <span>

#include "ppseq/model_context.hpp"
#include "ppseq/types.hpp"

namespace ppseq {

/// log V(K*) = log sum_{K >= K*} Poisson(K; mu) K! / (K - K*)! q^K, with
/// mu = event_rate * duration and log_q = log of the empty-event probability.
/// The series is truncated once a term falls below 1e-16 of the running sum
/// and K is past mu q + 10 sqrt(mu).
double log_V(int num_clusters, double mu, double log_q);
double log_V(int num_clusters, const Hyperparams& hyper);

/// Prior log probability of a partition of S = bg_size + sum(cluster_sizes)
/// spikes into a background set and the given non-empty clusters.
double log_partition_prior(std::size_t bg_size, std::span<const int> cluster_sizes,
                           const Hyperparams& hyper, double total_bg_rate);

/// Log evidence of a cluster of spikes with its latent event marginalised
/// (type, warp, time). Gaussian mass outside [0, T] is not truncated.
double log_marginal_cluster(std::span<const Spike> cluster, const ModelContext& ctx);

/// sum_s [log lambda_{n_s} - log lambda - log T] over background spikes.
double log_marginal_background(std::span<const Spike> background, const GlobalParams& params,
                               double duration);

}  // namespace ppseq
