#include "ppseq/driver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "ppseq/checkpoint.hpp"
#include "ppseq/model.hpp"
#include "ppseq/parallel.hpp"

namespace ppseq {

void ChainConfig::validate() const {
  hyper.validate();
  schedule.validate();
  if (!(mask_fraction >= 0.0 && mask_fraction < 1.0))
    throw std::invalid_argument("config: mask_fraction must lie in [0, 1)");
  if (!(mask_block_length > 0.0)) throw std::invalid_argument("config: mask_block_length must be positive");
  if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  if (!(neighbor_window > 0.0)) throw std::invalid_argument("config: neighbor_window must be positive");
}

int PosteriorSample::num_clusters() const { return static_cast<int>(events.size()); }

std::map<int, int> PosteriorSummary::k_histogram() const {
  std::map<int, int> h;
  for (const auto& s : samples) ++h[s.num_clusters()];
  return h;
}

double train_log_likelihood(std::span<const Spike> train, std::span<const LatentEvent> events,
                            const GlobalParams& params, const WarpGrid& grid,
                            const SpeckledMask& mask, double duration) {
  IntensityEvaluator eval(events, params, grid);
  double ll = eval.sum_log_intensity(train);
  ll -= params.total_bg_rate() * duration;
  for (const auto& e : events) ll -= e.amplitude;
  if (!mask.empty()) ll += masked_intensity_integral(events, params, grid, mask);
  return ll;
}

HeldoutScore heldout_log_likelihood(const Dataset& data, const SpeckledMask& mask,
                                    std::span<const PosteriorSample> samples,
                                    const WarpGrid& grid) {
  if (mask.empty()) throw std::invalid_argument("heldout: mask is empty");
  if (samples.empty()) throw std::invalid_argument("heldout: no posterior samples");
  const auto split = split_by_mask(data, mask);
  const int N = data.num_neurons;
  const double T = data.duration;

  std::vector<double> train_counts(static_cast<std::size_t>(N), 0.0);
  for (const auto& s : split.train) train_counts[s.neuron] += 1.0;
  double baseline = 0.0;
  std::vector<double> log_rate(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) {
    const double exposure = T - mask.masked_duration(n);
    // Half a spike keeps a silent neuron's rate positive.
    const double rate = (train_counts[n] > 0.0 ? train_counts[n] : 0.5) / exposure;
    log_rate[n] = std::log(rate);
    baseline -= rate * mask.masked_duration(n);
  }
  for (const auto& s : split.test) baseline += log_rate[s.neuron];

  double model = 0.0;
  for (const auto& sample : samples) {
    IntensityEvaluator eval(sample.events, sample.params, grid);
    model += eval.sum_log_intensity(split.test) -
             masked_intensity_integral(sample.events, sample.params, grid, mask);
  }
  model /= static_cast<double>(samples.size());

  HeldoutScore score;
  score.model_log_likelihood = model;
  score.baseline_log_likelihood = baseline;
  score.masked_area = mask.total_area();
  score.test_spikes = split.test.size();
  score.excess_nats_per_second = (model - baseline) / score.masked_area;
  return score;
}

std::vector<double> co_occupancy(std::span<const PosteriorSample> samples, std::size_t first,
                                 std::size_t last) {
  if (samples.empty()) throw std::invalid_argument("co_occupancy: no samples");
  if (last < first || last > samples.front().assignments.size())
    throw std::invalid_argument("co_occupancy: spike range out of bounds");
  const std::size_t m = last - first;
  std::vector<double> out(m * m, 0.0);
  for (const auto& s : samples)
    for (std::size_t i = 0; i < m; ++i) {
      const int a = s.assignments[first + i];
      if (a <= 0) continue;
      for (std::size_t j = i + 1; j < m; ++j)
        if (s.assignments[first + j] == a) out[i * m + j] += 1.0;
    }
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < m; ++i) {
    out[i * m + i] = 1.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      out[i * m + j] /= n;
      out[j * m + i] = out[i * m + j];
    }
  }
  return out;
}

namespace {

struct Run {
  const Dataset& data;
  const ChainConfig& cfg;
  Hyperparams hyper;
  WarpGrid grid;
  MaskedSplit split;
  const SpeckledMask& mask;
};

PosteriorSample snapshot(const Run& run, const ShardedChain& chain, int sweep, double train_ll) {
  PosteriorSample s;
  s.sweep = sweep;
  s.params = chain.params();
  s.train_log_likelihood = train_ll;
  s.assignments.assign(run.data.spikes.size(), -1);
  // Compact labels in dataset order.
  std::vector<std::vector<int>> compact(static_cast<std::size_t>(chain.num_shards()));
  for (int j = 0; j < chain.num_shards(); ++j)
    compact[j].assign(chain.shard(j).num_slots() + 1, 0);
  std::vector<std::pair<std::size_t, std::pair<int, std::size_t>>> order;  // dataset index, (shard, local)
  for (int j = 0; j < chain.num_shards(); ++j) {
    const auto& st = chain.shard(j);
    for (std::size_t i = 0; i < st.num_observed(); ++i)
      order.push_back({run.split.train_index[chain.source_index(j, i)], {j, i}});
  }
  std::sort(order.begin(), order.end());
  int next = 0;
  for (const auto& [d, where] : order) {
    const auto& st = chain.shard(where.first);
    const int l = st.label(where.second);
    if (l <= 0) {
      s.assignments[d] = 0;
      continue;
    }
    int& c = compact[where.first][l];
    if (c == 0) {
      c = ++next;
      s.events.push_back(st.cluster(l).event);
    }
    s.assignments[d] = c;
  }
  // Clusters made only of imputed spikes still shape the intensity.
  for (int j = 0; j < chain.num_shards(); ++j)
    for (int id : chain.shard(j).live_clusters())
      if (compact[j][id] == 0) s.events.push_back(chain.shard(j).cluster(id).event);
  return s;
}

ChainCheckpoint capture(ShardedChain& chain, Rng& master, std::uint64_t seed, int next_sweep,
                        const PosteriorSummary& summary) {
  ChainCheckpoint cp;
  cp.seed = seed;
  cp.next_sweep = next_sweep;
  cp.master_rng = master.save_state();
  cp.params = chain.params();
  cp.summary = summary;
  for (int j = 0; j < chain.num_shards(); ++j) {
    cp.shard_rngs.push_back(j == 0 ? std::string() : chain.shard_rng(j).save_state());
    const auto& st = chain.shard(j);
    ChainCheckpoint::Shard sh;
    sh.spikes = st.spikes();
    sh.num_observed = st.num_observed();
    sh.labels = st.labels();
    for (const auto& slot : st.slots())
      sh.slots.push_back({slot.live, slot.stats.anchor(), slot.event, slot.members});
    sh.live = st.live_clusters();
    sh.free_list = st.free_slots();
    cp.shards.push_back(std::move(sh));
  }
  return cp;
}

void restore(ShardedChain& chain, Rng& master, const ChainCheckpoint& cp) {
  if (static_cast<int>(cp.shards.size()) != chain.num_shards())
    throw CheckpointError("checkpoint: shard count does not match the configured threads");
  master.load_state(cp.master_rng);
  chain.set_params(cp.params);
  for (int j = 0; j < chain.num_shards(); ++j) {
    if (j > 0) chain.shard_rng(j).load_state(cp.shard_rngs[j]);
    const auto& sh = cp.shards[j];
    auto& st = chain.shard(j);
    std::vector<ClusterSlot> slots(sh.slots.size());
    for (std::size_t k = 0; k < sh.slots.size(); ++k) {
      slots[k].live = sh.slots[k].live;
      slots[k].stats.reset(sh.slots[k].anchor, st.context().num_hypotheses());
      slots[k].event = sh.slots[k].event;
      slots[k].members = sh.slots[k].members;
    }
    st.restore_layout(sh.spikes, sh.num_observed, sh.labels, std::move(slots), sh.live,
                      sh.free_list);
  }
}

}  // namespace

PosteriorSummary run_chain(const Dataset& data, const ChainConfig& config,
                           const SpeckledMask& mask, std::uint64_t seed, RunControl* control) {
  config.validate();
  Run run{data, config, config.hyper, {}, {}, mask};
  run.hyper.num_neurons = data.num_neurons;
  run.hyper.duration = data.duration;
  run.grid = build_warp_grid(run.hyper.num_warps, run.hyper.max_warp, run.hyper.warp_variance);
  run.split = split_by_mask(data, mask);
  const auto& sched = config.schedule;

  Rng rng(seed);
  ShardedChain chain(run.hyper, run.grid, GlobalParams(run.hyper.num_neurons, run.hyper.num_types),
                     run.split.train, config.threads, derive_seed(seed, kShardStream));
  if (std::isfinite(config.neighbor_window)) chain.set_neighbor_window(config.neighbor_window);

  auto train_ll = [&] {
    return train_log_likelihood(run.split.train, chain.events(), chain.params(), run.grid, mask,
                                data.duration);
  };

  PosteriorSummary summary;
  const int total = sched.total_sweeps();
  int start = 0;
  if (control && control->resume) {
    if (control->resume->seed != seed)
      throw CheckpointError("checkpoint was written with seed " +
                            std::to_string(control->resume->seed) + ", not " +
                            std::to_string(seed));
    if (control->resume->next_sweep > total)
      throw CheckpointError("checkpoint is past the end of the configured schedule");
    restore(chain, rng, *control->resume);
    summary = control->resume->summary;
    start = control->resume->next_sweep;
  } else {
    chain.set_params(resample_globals(chain.gather(), run.hyper, rng));
    const double ll = train_ll();
    summary.trace.push_back({0, temperature_at(sched, 0), 0, chain.background_size(), ll, 0});
    if (total == 0) summary.samples.push_back(snapshot(run, chain, 0, ll));
  }

  const int annealing = sched.num_stages * sched.sweeps_per_stage;
  const int retained = std::min(sched.retained, sched.final_sweeps);
  const int first_kept = total - retained;

  for (int s = start; s < total; ++s) {
    const double temp = temperature_at(sched, s);
    const auto [shape, rate] =
        anneal_amplitude_prior(run.hyper.amplitude_shape, run.hyper.amplitude_rate, temp);
    chain.set_amplitude_prior(shape, rate);
    if (!mask.empty()) chain.impute(mask, rng);
    const int moves = s < annealing ? sched.anneal_split_merge_moves : sched.split_merge_moves;
    const auto sm = chain.split_merge(moves, rng);
    summary.split_merge += sm;
    chain.sweep(rng, config.order);

    const double ll = train_ll();
    TracePoint tp{s + 1, temp, chain.num_clusters(), chain.background_size(), ll, sm.accepted};
    summary.trace.push_back(tp);
    if (s >= first_kept && (s - first_kept) % sched.thin == 0)
      summary.samples.push_back(snapshot(run, chain, s + 1, ll));
    else if (s == total - 1 && summary.samples.empty())
      summary.samples.push_back(snapshot(run, chain, s + 1, ll));
    if (control && control->on_sweep) control->on_sweep(tp);

    if (control && control->stop && control->stop->load() && s + 1 < total) {
      const std::string path =
          control->checkpoint_path.empty() ? std::string("ppseq.checkpoint.json")
                                           : control->checkpoint_path;
      write_checkpoint(path, capture(chain, rng, seed, s + 1, summary));
      throw Interrupted(path);
    }
  }

  if (!mask.empty() && !summary.samples.empty())
    summary.heldout = heldout_log_likelihood(data, mask, summary.samples, run.grid);
  return summary;
}

std::vector<PosteriorSummary> run_chains(const Dataset& data, const ChainConfig& config,
                                         const SpeckledMask& mask, std::uint64_t seed,
                                         int num_chains) {
  if (num_chains < 1) throw std::invalid_argument("run_chains: need at least one chain");
  std::vector<PosteriorSummary> out(static_cast<std::size_t>(num_chains));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(num_chains));
  {
    std::vector<std::jthread> workers;
    for (int c = 0; c < num_chains; ++c)
      workers.emplace_back([&, c] {
        try {
          out[c] = run_chain(data, config, mask, derive_seed(seed, static_cast<std::uint64_t>(c)));
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace ppseq
