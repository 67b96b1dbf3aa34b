#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "oracles/oracles.hpp"
#include "ppseq/anneal.hpp"
#include "ppseq/checkpoint.hpp"
#include "ppseq/driver.hpp"
#include "ppseq/generative.hpp"
#include "ppseq/mask.hpp"
#include "ppseq/model.hpp"

using namespace ppseq;

namespace {

Hyperparams small_hyper() {
  Hyperparams h;
  h.num_neurons = 12;
  h.num_types = 2;
  h.duration = 60.0;
  h.event_rate = 0.15;
  h.amplitude_shape = 30.0;
  h.amplitude_rate = 2.0;
  h.width_scale = 0.02;
  h.width_dof = 10.0;
  h.delay_precision = 1.0;
  h.bg_shape = 5.0;
  h.bg_rate = 25.0;
  return h;
}

ChainConfig small_config() {
  ChainConfig c;
  c.hyper = small_hyper();
  c.schedule.initial_temperature = 20.0;
  c.schedule.num_stages = 3;
  c.schedule.sweeps_per_stage = 5;
  c.schedule.final_sweeps = 10;
  c.schedule.split_merge_moves = 20;
  c.schedule.retained = 5;
  c.schedule.thin = 2;
  return c;
}

Dataset small_data(std::uint64_t seed) {
  Rng rng(seed);
  const auto h = small_hyper();
  return simulate(h, build_warp_grid(1, 1.0, 1.0), rng).data;
}

}  // namespace

TEST(Anneal, GeometricStageTemperatures) {
  AnnealSchedule s;
  s.initial_temperature = 500.0;
  s.num_stages = 20;
  const auto t = temperatures(s);
  ASSERT_EQ(t.size(), 21u);
  for (int j = 0; j <= 20; ++j) EXPECT_NEAR(t[j], std::pow(500.0, 1.0 - j / 20.0), 1e-9);
  EXPECT_EQ(temperature_at(s, 0), 500.0);
  EXPECT_EQ(temperature_at(s, s.num_stages * s.sweeps_per_stage), 1.0);
  const auto [a, b] = anneal_amplitude_prior(225.0, 7.5, 10.0);
  EXPECT_NEAR(a / b, 30.0, 1e-12);
  EXPECT_NEAR(a / (b * b), 10.0 * 225.0 / (7.5 * 7.5), 1e-9);
}

TEST(Mask, FractionOfAreaIsWithheld) {
  const Dataset d = small_data(1);
  Rng rng(2);
  const SpeckledMask m = make_speckled_mask(d, 0.075, 1.0, rng);
  const double total = d.num_neurons * d.duration;
  EXPECT_NEAR(m.total_area() / total, 0.075, 0.01);
  const auto split = split_by_mask(d, m);
  EXPECT_EQ(split.train.size() + split.test.size(), d.size());
  for (const auto& s : split.test) EXPECT_TRUE(m.contains(s));
  for (const auto& s : split.train) EXPECT_FALSE(m.contains(s));
}

TEST(Mask, RejectsOverlappingBlocks) {
  EXPECT_THROW(SpeckledMask(2, 10.0, {{0, 1.0, 3.0}, {0, 2.0, 4.0}}), std::invalid_argument);
  EXPECT_THROW(SpeckledMask(2, 10.0, {{0, 9.0, 11.0}}), std::invalid_argument);
}

TEST(Mask, ImputedCountMatchesIntensityIntegral) {
  const auto h = small_hyper();
  const auto grid = build_warp_grid(1, 1.0, 1.0);
  Rng rng(3);
  const auto sim = simulate(h, grid, rng);
  const SpeckledMask m = make_speckled_mask(sim.data, 0.2, 1.0, rng);
  // Quadrature of the intensity over every masked block.
  double expected = 0.0;
  for (const auto& b : m.blocks())
    expected += oracle::integrate(
        [&](double t) { return intensity(t, b.neuron, sim.truth.events, sim.params, grid); }, b.start,
        b.end, 1e-10);
  EXPECT_NEAR(masked_intensity_integral(sim.truth.events, sim.params, grid, m), expected,
              1e-6 * expected);
  const int draws = 10000;
  double total = 0.0;
  for (int i = 0; i < draws; ++i) {
    const auto s = impute_masked_spikes(sim.truth.events, sim.params, grid, m, rng);
    for (const auto& x : s) ASSERT_TRUE(m.contains(x));
    total += static_cast<double>(s.size());
  }
  EXPECT_NEAR(total / draws, expected, 3.0 * std::sqrt(expected / draws));
}

TEST(Driver, ZeroSweepsKeepsInitialSample) {
  ChainConfig c = small_config();
  c.schedule.num_stages = 0;
  c.schedule.final_sweeps = 0;
  const Dataset d = small_data(4);
  const auto s = run_chain(d, c, SpeckledMask(d.num_neurons, d.duration, {}), 5);
  ASSERT_EQ(s.samples.size(), 1u);
  EXPECT_EQ(s.samples[0].sweep, 0);
  EXPECT_EQ(s.samples[0].num_clusters(), 0);
  for (int l : s.samples[0].assignments) EXPECT_EQ(l, 0);
}

TEST(Driver, RetainsThinnedWindowAndTrace) {
  const ChainConfig c = small_config();
  const Dataset d = small_data(6);
  const auto s = run_chain(d, c, SpeckledMask(d.num_neurons, d.duration, {}), 7);
  EXPECT_EQ(s.trace.size(), static_cast<std::size_t>(c.schedule.total_sweeps() + 1));
  ASSERT_EQ(s.samples.size(), 3u);  // sweeps 21, 23, 25 of 25
  EXPECT_EQ(s.samples.back().sweep, 25);
  for (const auto& smp : s.samples) {
    ASSERT_EQ(smp.assignments.size(), d.size());
    int max_label = 0;
    for (int l : smp.assignments) max_label = std::max(max_label, l);
    EXPECT_EQ(max_label, smp.num_clusters());
  }
  EXPECT_FALSE(s.heldout.has_value());
}

TEST(Driver, SameSeedSameResult) {
  ChainConfig c = small_config();
  c.mask_fraction = 0.1;
  const Dataset d = small_data(8);
  Rng mrng(1);
  const auto mask = make_speckled_mask(d, c.mask_fraction, 1.0, mrng);
  const auto a = run_chain(d, c, mask, 9);
  const auto b = run_chain(d, c, mask, 9);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].assignments, b.samples[i].assignments);
    EXPECT_EQ(a.samples[i].events, b.samples[i].events);
    EXPECT_EQ(a.samples[i].params, b.samples[i].params);
  }
  ASSERT_TRUE(a.heldout.has_value());
  EXPECT_EQ(a.heldout->excess_nats_per_second, b.heldout->excess_nats_per_second);
  for (const auto& smp : a.samples)
    for (std::size_t i = 0; i < d.size(); ++i)
      EXPECT_EQ(smp.assignments[i] == -1, mask.contains(d.spikes[i]));
}

TEST(Driver, InterruptAndResumeIsBitExact) {
  ChainConfig c = small_config();
  c.mask_fraction = 0.1;
  c.threads = 2;
  const Dataset d = small_data(10);
  Rng mrng(1);
  const auto mask = make_speckled_mask(d, c.mask_fraction, 1.0, mrng);
  const auto full = run_chain(d, c, mask, 11);

  const auto path = (std::filesystem::temp_directory_path() / "ppseq_resume_test.json").string();
  std::atomic<bool> stop{false};
  RunControl ctl;
  ctl.stop = &stop;
  ctl.checkpoint_path = path;
  ctl.on_sweep = [&](const TracePoint& t) {
    if (t.sweep == 17) stop = true;
  };
  EXPECT_THROW(run_chain(d, c, mask, 11, &ctl), Interrupted);
  const ChainCheckpoint cp = read_checkpoint(path);
  EXPECT_EQ(cp.next_sweep, 17);

  RunControl resume;
  resume.resume = &cp;
  const auto rest = run_chain(d, c, mask, 11, &resume);
  ASSERT_EQ(rest.samples.size(), full.samples.size());
  for (std::size_t i = 0; i < full.samples.size(); ++i) {
    EXPECT_EQ(rest.samples[i].assignments, full.samples[i].assignments);
    EXPECT_EQ(rest.samples[i].events, full.samples[i].events);
    EXPECT_EQ(rest.samples[i].params, full.samples[i].params);
  }
  ASSERT_EQ(rest.trace.size(), full.trace.size());
  for (std::size_t i = 0; i < full.trace.size(); ++i)
    EXPECT_EQ(rest.trace[i].train_log_likelihood, full.trace[i].train_log_likelihood);
  EXPECT_EQ(rest.heldout->excess_nats_per_second, full.heldout->excess_nats_per_second);

  RunControl wrong;
  wrong.resume = &cp;
  EXPECT_THROW(run_chain(d, c, mask, 12, &wrong), CheckpointError);
  std::filesystem::remove(path);
}

TEST(Checkpoint, VersionMismatchIsRejected) {
  ChainCheckpoint cp;
  cp.seed = 3;
  std::string text = serialize_checkpoint(cp);
  EXPECT_NO_THROW(parse_checkpoint(text));
  const auto pos = text.find("\"format_version\":1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 18, "\"format_version\":9");
  EXPECT_THROW(parse_checkpoint(text), CheckpointError);
}

TEST(Driver, CoOccupancyDiagonalAndSymmetry) {
  const ChainConfig c = small_config();
  const Dataset d = small_data(13);
  const auto s = run_chain(d, c, SpeckledMask(d.num_neurons, d.duration, {}), 14);
  const std::size_t n = std::min<std::size_t>(d.size(), 30);
  const auto m = co_occupancy(s.samples, 0, n);
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_EQ(m[i * n + i], 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      EXPECT_EQ(m[i * n + j], m[j * n + i]);
      EXPECT_GE(m[i * n + j], 0.0);
      EXPECT_LE(m[i * n + j], 1.0);
    }
  }
}

TEST(Driver, RecoversPlantedSequences) {
  ChainConfig c = small_config();
  c.schedule.num_stages = 5;
  c.schedule.sweeps_per_stage = 20;
  c.schedule.final_sweeps = 40;
  c.schedule.retained = 20;
  const Hyperparams h = small_hyper();
  Rng rng(15);
  const auto sim = simulate(h, build_warp_grid(1, 1.0, 1.0), rng);
  const auto s = run_chain(sim.data, c, SpeckledMask(sim.data.num_neurons, sim.data.duration, {}), 16);
  std::vector<double> k;
  for (const auto& smp : s.samples) k.push_back(smp.num_clusters());
  std::size_t nonempty = 0;
  std::vector<int> seen(sim.truth.events.size() + 1, 0);
  for (int p : sim.truth.parents) seen[p] = 1;
  for (std::size_t i = 1; i < seen.size(); ++i) nonempty += seen[i];
  EXPECT_NEAR(oracle::quantile(k, 0.5), static_cast<double>(nonempty), 0.25 * nonempty + 1.0);
}
