#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ppseq/checkpoint.hpp"
#include "ppseq/driver.hpp"
#include "ppseq/eval.hpp"
#include "ppseq/generative.hpp"
#include "ppseq/hyper_sweep.hpp"
#include "ppseq/io.hpp"
#include "ppseq/mask.hpp"
#include "ppseq/random.hpp"
#include "ppseq/warp_grid.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace ppseq::cli {

std::atomic<bool>& stop_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> chains;
  std::optional<double> mask_fraction;
  std::string output_dir;
  std::string data;
  std::string resume;
  std::string co_occupancy;
  std::vector<std::string> samples;
  std::string truth;
  std::string mask;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fs::path output_dir(const Options& o) {
  fs::path dir = o.output_dir;
  if (dir.empty()) {
    const char* env = std::getenv("PPSEQ_OUTPUT_DIR");
    dir = env && *env ? fs::path(env) : fs::path(".");
  }
  fs::create_directories(dir);
  return dir;
}

std::ofstream create(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

RunConfig load_config(const Options& o) {
  if (o.config.empty()) throw UsageError("--config is required");
  if (!fs::exists(o.config)) throw ConfigError("config file '" + o.config + "' does not exist");
  RunConfig c = read_run_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.chain.threads = *o.threads;
  if (o.chains) c.chains = *o.chains;
  if (o.mask_fraction) c.chain.mask_fraction = *o.mask_fraction;
  if (!o.data.empty()) c.data_path = o.data;
  if (c.chains < 1) throw ConfigError("chains must be >= 1");
  return c;
}

// Relative data paths in a config file are resolved against the config's
// directory; paths given on the command line against the working directory.
std::string resolve_data_path(const Options& o, const RunConfig& c) {
  if (c.data_path.empty()) throw ConfigError("no spike data given (use --data or the 'data' key)");
  fs::path p = c.data_path;
  if (o.data.empty() && p.is_relative() && !o.config.empty())
    p = fs::path(o.config).parent_path() / p;
  return p.string();
}

Dataset load_data(const Options& o, RunConfig& c) {
  Dataset data = parse_spikes(resolve_data_path(o, c), c.num_neurons, c.duration);
  c.num_neurons = data.num_neurons;
  c.duration = data.duration;
  c.chain.hyper.num_neurons = data.num_neurons;
  c.chain.hyper.duration = data.duration;
  return data;
}

std::string suffixed(const std::string& stem, const std::string& ext, int chain, int chains) {
  return chains == 1 ? stem + ext : stem + "_chain" + std::to_string(chain + 1) + ext;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("--co-occupancy expects FIRST:LAST");
  try {
    return {std::stoul(s.substr(0, colon)), std::stoul(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw UsageError("--co-occupancy expects FIRST:LAST, got '" + s + "'");
  }
}

int run_generate(const Options& o, std::ostream& out) {
  RunConfig c = load_config(o);
  if (!c.num_neurons || !c.duration)
    throw ConfigError("generate needs hyperparams.num_neurons and hyperparams.duration");
  const Hyperparams& h = c.chain.hyper;
  h.validate();
  const WarpGrid grid = build_warp_grid(h.num_warps, h.max_warp, h.warp_variance);
  Rng rng(c.seed);
  GlobalParams params = sample_global_params(h, rng);
  if (c.fixed_bg_rate) std::fill(params.bg_rates.begin(), params.bg_rates.end(), *c.fixed_bg_rate);
  if (c.fixed_width) std::fill(params.widths.begin(), params.widths.end(), *c.fixed_width);
  const Simulation sim = simulate(h, params, grid, rng);

  const fs::path dir = output_dir(o);
  auto spikes = create(dir / "spikes.csv");
  write_spikes(spikes, sim.data, provenance("ppseq-spikes", c, c.seed));
  auto truth = create(dir / "truth.json");
  write_truth(truth, sim, provenance("ppseq-truth", c, c.seed));
  out << "generated " << sim.data.size() << " spikes from " << sim.truth.events.size()
      << " sequence events into " << dir.string() << '\n';
  return kOk;
}

int run_fit(const Options& o, std::ostream& out) {
  RunConfig c = load_config(o);
  const Dataset data = load_data(o, c);
  if (!o.co_occupancy.empty()) c.co_occupancy = parse_range(o.co_occupancy);
  c.chain.validate();

  SpeckledMask mask(data.num_neurons, data.duration, {});
  if (c.chain.mask_fraction > 0.0) {
    Rng mask_rng(derive_seed(c.seed, kMaskStream));
    mask = make_speckled_mask(data, c.chain.mask_fraction, c.chain.mask_block_length, mask_rng);
  }

  std::optional<ChainCheckpoint> resume;
  if (!o.resume.empty()) {
    if (c.chains != 1) throw ConfigError("--resume supports single-chain runs only");
    resume = read_checkpoint(o.resume);
  }

  const fs::path dir = output_dir(o);
  if (!mask.empty()) {
    auto f = create(dir / "mask.csv");
    write_mask_csv(f, mask, provenance("ppseq-mask", c, c.seed));
  }

  const int total = c.chain.schedule.total_sweeps();
  const int every = std::max(1, total / 10);
  std::vector<PosteriorSummary> summaries;
  for (int k = 0; k < c.chains; ++k) {
    const std::uint64_t chain_seed = derive_seed(c.seed, static_cast<std::uint64_t>(k));
    RunControl control;
    control.stop = &stop_flag();
    control.checkpoint_path = (dir / suffixed("checkpoint", ".json", k, c.chains)).string();
    if (resume) control.resume = &*resume;
    control.on_sweep = [&, k](const TracePoint& t) {
      if (t.sweep % every == 0 || t.sweep == total)
        std::clog << "chain " << k + 1 << " sweep " << t.sweep << '/' << total
                  << " K=" << t.num_clusters << " ll=" << t.train_log_likelihood << '\n';
    };
    summaries.push_back(run_chain(data, c.chain, mask, chain_seed, &control));
    const PosteriorSummary& s = summaries.back();

    auto samples = create(dir / suffixed("samples", ".jsonl", k, c.chains));
    write_samples(samples, s, provenance("ppseq-samples", c, chain_seed));
    auto trace = create(dir / suffixed("trace", ".csv", k, c.chains));
    write_trace_csv(trace, s, provenance("ppseq-trace", c, chain_seed));
    auto hist = create(dir / suffixed("k_histogram", ".csv", k, c.chains));
    write_k_histogram_csv(hist, s, provenance("ppseq-k-histogram", c, chain_seed));
    if (resume) fs::remove(o.resume);
  }

  if (c.co_occupancy) {
    auto [first, last] = *c.co_occupancy;
    last = std::min(last, data.size());
    if (first >= last) throw ConfigError("co-occupancy range is empty");
    auto f = create(dir / "co_occupancy.csv");
    write_co_occupancy_csv(f, co_occupancy(summaries.front().samples, first, last), first,
                           last - first, provenance("ppseq-co-occupancy", c, c.seed));
  }

  auto report = create(dir / "fit.json");
  write_fit_report(report, summaries, provenance("ppseq-fit", c, c.seed));
  out << "fit " << c.chains << " chain(s) on " << data.size() << " spikes";
  if (summaries.front().heldout)
    out << "; held-out excess " << summaries.front().heldout->excess_nats_per_second
        << " nats/s";
  out << "; outputs in " << dir.string() << '\n';
  return kOk;
}

int run_evaluate(const Options& o, std::ostream& out) {
  if (o.samples.empty()) throw UsageError("evaluate needs at least one --samples file");
  if (o.truth.empty() && o.mask.empty())
    throw UsageError("evaluate needs --truth (detection AUC) or --mask (held-out score)");

  std::vector<PosteriorSample> samples;
  std::string header;
  for (const auto& path : o.samples) {
    std::string h;
    auto part = read_samples(path, &h);
    if (header.empty()) header = h;
    samples.insert(samples.end(), part.begin(), part.end());
  }
  if (samples.empty()) throw DataError("sample files contain no samples");

  RunConfig c;
  if (!o.config.empty()) {
    c = load_config(o);
  } else {
    c = parse_run_config(ojson::parse(header).at("config").dump());
    if (o.seed) c.seed = *o.seed;
  }
  if (!c.duration) throw ConfigError("the sample header does not record the recording duration");
  const double T = *c.duration;

  const fs::path dir = output_dir(o);
  ojson report{{"provenance", ojson::parse(provenance("ppseq-evaluation", c, c.seed))}};

  if (!o.truth.empty()) {
    const GroundTruth truth = read_truth(o.truth);
    const auto scores = event_rate_vector(samples, c.bin_size, T);
    const auto labels = event_indicator_vector(truth.events, c.bin_size, T);
    const ShiftedAuc best = shifted_roc_auc(scores, labels, c.max_shift);
    const auto shifted = shift_scores(scores, best.shift);
    const auto curve = roc_curve(shifted, labels);
    auto roc = create(dir / "roc.csv");
    write_roc_csv(roc, curve, provenance("ppseq-roc", c, c.seed));
    report["detection"] = {{"auc", best.auc},
                           {"shift_bins", best.shift},
                           {"bin_size", c.bin_size},
                           {"max_shift", c.max_shift},
                           {"true_events", truth.events.size()}};
    out << "detection AUC " << best.auc << " (shift " << best.shift << " bins)\n";
  }

  if (!o.mask.empty()) {
    Options with_data = o;
    if (with_data.data.empty() && c.data_path.empty())
      throw UsageError("held-out scoring needs --data");
    const Dataset data = parse_spikes(o.data.empty() ? c.data_path : o.data, c.num_neurons, T);
    const SpeckledMask mask = read_mask_csv(o.mask, data.num_neurons, data.duration);
    const Hyperparams& h = c.chain.hyper;
    const WarpGrid grid = build_warp_grid(h.num_warps, h.max_warp, h.warp_variance);
    const HeldoutScore s = heldout_log_likelihood(data, mask, samples, grid);
    report["heldout"] = {{"excess_nats_per_second", s.excess_nats_per_second},
                         {"model_log_likelihood", s.model_log_likelihood},
                         {"baseline_log_likelihood", s.baseline_log_likelihood},
                         {"masked_area", s.masked_area},
                         {"test_spikes", s.test_spikes}};
    out << "held-out excess " << s.excess_nats_per_second << " nats/s\n";
  }

  auto f = create(dir / "evaluation.json");
  f << report.dump(2) << '\n';
  return kOk;
}

int run_sweep(const Options& o, std::ostream& out) {
  RunConfig c = load_config(o);
  const Dataset data = load_data(o, c);
  if (c.num_configs < 1) throw ConfigError("sweep.num_configs must be >= 1");
  if (!(c.chain.mask_fraction > 0.0))
    throw ConfigError("sweep scores held-out data; set mask.fraction > 0");
  c.search.validate();
  // --threads sets how many configurations run at once; each fit is serial.
  ChainConfig base = c.chain;
  const int concurrent = std::max(1, base.threads);
  base.threads = 1;
  const auto rows = hyperparameter_sweep(data, base, c.search, c.num_configs, c.seed, concurrent);
  const fs::path dir = output_dir(o);
  auto f = create(dir / "sweep.csv");
  write_sweep_csv(f, rows, provenance("ppseq-sweep", c, c.seed));
  if (!rows.empty() && !rows.front().error)
    out << "best configuration #" << rows.front().index << " scored "
        << rows.front().validation_score << " nats/s\n";
  return kOk;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config, "JSON configuration file");
  app->add_option("--seed", o.seed, "Random seed (overrides the config)");
  app->add_option("--output-dir", o.output_dir,
                  "Output directory (default: $PPSEQ_OUTPUT_DIR or the working directory)");
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequence detection in spike trains with point-process mixtures", "ppseq"};
  app.set_version_flag("--version", std::string("ppseq ") + PPSEQ_VERSION);
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("generate", "Simulate spikes and ground-truth events");
  add_common(gen, o);

  auto* fit = app.add_subcommand("fit", "Run MCMC chains on a spike dataset");
  add_common(fit, o);
  fit->add_option("--data", o.data, "Spike CSV (overrides the config)");
  fit->add_option("--threads", o.threads, "Time shards swept in parallel")->check(CLI::PositiveNumber);
  fit->add_option("--chains", o.chains, "Independent chains")->check(CLI::PositiveNumber);
  fit->add_option("--mask-fraction", o.mask_fraction, "Fraction of neuron-time held out")
      ->check(CLI::Range(0.0, 1.0));
  fit->add_option("--co-occupancy", o.co_occupancy,
                  "Write the co-occupancy matrix for spikes FIRST:LAST");
  fit->add_option("--resume", o.resume, "Continue from a checkpoint file");

  auto* ev = app.add_subcommand("evaluate", "Score saved posterior samples");
  add_common(ev, o);
  ev->add_option("--samples", o.samples, "Posterior sample files (JSON lines)")->required();
  ev->add_option("--truth", o.truth, "Ground-truth events from generate");
  ev->add_option("--data", o.data, "Spike CSV for held-out scoring");
  ev->add_option("--mask", o.mask, "Mask CSV written by fit");

  auto* sw = app.add_subcommand("sweep", "Randomized hyperparameter search");
  add_common(sw, o);
  sw->add_option("--data", o.data, "Spike CSV (overrides the config)");
  sw->add_option("--threads", o.threads, "Configurations fitted concurrently")
      ->check(CLI::PositiveNumber);
  sw->add_option("--mask-fraction", o.mask_fraction, "Fraction of neuron-time held out")
      ->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) return run_generate(o, out);
    if (fit->parsed()) return run_fit(o, out);
    if (ev->parsed()) return run_evaluate(o, out);
    return run_sweep(o, out);
  } catch (const Interrupted& e) {
    err << "interrupted: " << e.what() << "; continue with --resume " << e.path << '\n';
    return kInterrupted;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kData;
  } catch (const CheckpointError& e) {
    err << "checkpoint error: " << e.what() << '\n';
    return kCheckpoint;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace ppseq::cli
