#include "ppseq/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "json_convert.hpp"

namespace ppseq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void comment_line(std::ostream& out, const std::string& provenance) {
  if (!provenance.empty()) out << "# " << provenance << '\n';
}

std::ifstream open_input(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw DataError(std::string("cannot open ") + what + " file '" + path + "'");
  return in;
}

}  // namespace

Dataset parse_spikes(std::istream& in, const std::string& name, std::optional<int> num_neurons,
                     std::optional<double> duration) {
  std::vector<Spike> spikes;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      std::string h = t;
      h.erase(std::remove(h.begin(), h.end(), ' '), h.end());
      if (h == "neuron,time") continue;
      throw DataError(name + ":" + std::to_string(lineno) +
                      ": expected header 'neuron,time', found '" + t + "'");
    }
    const auto comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos)
      throw DataError(name + ":" + std::to_string(lineno) +
                      ": expected two comma-separated fields 'neuron,time'");
    const std::string a = trim(t.substr(0, comma));
    const std::string b = trim(t.substr(comma + 1));
    long id;
    double time;
    try {
      std::size_t used = 0;
      id = std::stol(a, &used);
      if (used != a.size()) throw std::invalid_argument(a);
      time = std::stod(b, &used);
      if (used != b.size()) throw std::invalid_argument(b);
    } catch (const std::exception&) {
      throw DataError(name + ":" + std::to_string(lineno) + ": cannot parse '" + t + "'");
    }
    if (id < 1)
      throw DataError(name + ":" + std::to_string(lineno) + ": neuron id " + std::to_string(id) +
                      " is invalid; neuron ids are 1-based and must be >= 1");
    if (!(time >= 0.0) || !std::isfinite(time))
      throw DataError(name + ":" + std::to_string(lineno) + ": spike time must be finite and >= 0");
    spikes.push_back({static_cast<int>(id - 1), time});
  }
  if (!header_seen) throw DataError(name + ": empty spike file (missing 'neuron,time' header)");

  int max_id = 0;
  double max_time = 0.0;
  for (const auto& s : spikes) {
    max_id = std::max(max_id, s.neuron + 1);
    max_time = std::max(max_time, s.time);
  }
  int N;
  if (num_neurons) {
    N = *num_neurons;
    if (max_id > N)
      throw DataError(name + ": neuron id " + std::to_string(max_id) +
                      " exceeds the configured number of neurons " + std::to_string(N));
  } else {
    N = std::max(max_id, 1);
    std::clog << "info: " << name << ": inferred number of neurons N = " << N << '\n';
  }
  double T;
  if (duration) {
    T = *duration;
    if (max_time > T)
      throw DataError(name + ": spike time " + std::to_string(max_time) +
                      " exceeds the configured duration " + std::to_string(T));
  } else {
    T = std::max(std::ceil(max_time), 1.0);
    if (T == max_time && max_time > 0.0) T = max_time;
    std::clog << "info: " << name << ": inferred duration T = " << T << '\n';
  }
  try {
    return Dataset(N, T, std::move(spikes));
  } catch (const std::invalid_argument& e) {
    throw DataError(name + ": " + e.what());
  }
}

Dataset parse_spikes(const std::string& path, std::optional<int> num_neurons,
                     std::optional<double> duration) {
  auto in = open_input(path, "spike");
  return parse_spikes(in, path, num_neurons, duration);
}

void write_spikes(std::ostream& out, const Dataset& data, const std::string& provenance) {
  comment_line(out, provenance);
  out << "neuron,time\n";
  out << std::setprecision(17);
  for (const auto& s : data.spikes) out << s.neuron + 1 << ',' << s.time << '\n';
}

namespace {

SweepOrder parse_order(const std::string& s) {
  if (s == "ascending") return SweepOrder::ascending;
  if (s == "descending") return SweepOrder::descending;
  if (s == "random") return SweepOrder::random;
  throw ConfigError("sampler.order must be ascending, descending or random (got '" + s + "')");
}

const char* order_name(SweepOrder o) {
  switch (o) {
    case SweepOrder::ascending: return "ascending";
    case SweepOrder::descending: return "descending";
    case SweepOrder::random: return "random";
  }
  return "ascending";
}

DimensionKind parse_kind(const std::string& s) {
  if (s == "uniform") return DimensionKind::uniform;
  if (s == "log_uniform") return DimensionKind::log_uniform;
  if (s == "int_uniform") return DimensionKind::int_uniform;
  if (s == "fixed") return DimensionKind::fixed;
  throw ConfigError("sweep dimension kind must be uniform, log_uniform, int_uniform or fixed");
}

const char* kind_name(DimensionKind k) {
  switch (k) {
    case DimensionKind::uniform: return "uniform";
    case DimensionKind::log_uniform: return "log_uniform";
    case DimensionKind::int_uniform: return "int_uniform";
    case DimensionKind::fixed: return "fixed";
  }
  return "uniform";
}

void check_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  try {
    check_keys(j,
               {"seed", "chains", "threads", "data", "hyperparams", "schedule", "mask", "sampler",
                "evaluate", "sweep", "generate", "co_occupancy", "format", "format_version"},
               "config");
    if (j.contains("format_version") && j["format_version"].get<int>() != kFileFormatVersion)
      throw ConfigError("config format_version " + j["format_version"].dump() +
                        " is not supported");
    c.seed = j.value("seed", c.seed);
    c.chains = j.value("chains", c.chains);
    c.chain.threads = j.value("threads", c.chain.threads);
    c.data_path = j.value("data", std::string());
    if (j.contains("hyperparams")) {
      const auto& h = j["hyperparams"];
      if (!h.is_object()) throw ConfigError("hyperparams must be a JSON object");
      c.chain.hyper = h.get<Hyperparams>();
      if (h.contains("num_neurons")) c.num_neurons = c.chain.hyper.num_neurons;
      if (h.contains("duration")) c.duration = c.chain.hyper.duration;
    }
    if (j.contains("schedule")) c.chain.schedule = j["schedule"].get<AnnealSchedule>();
    if (j.contains("mask")) {
      const auto& m = j["mask"];
      check_keys(m, {"fraction", "block_length"}, "mask");
      c.chain.mask_fraction = m.value("fraction", c.chain.mask_fraction);
      c.chain.mask_block_length = m.value("block_length", c.chain.mask_block_length);
    }
    if (j.contains("sampler")) {
      const auto& s = j["sampler"];
      check_keys(s, {"order", "neighbor_window"}, "sampler");
      if (s.contains("order")) c.chain.order = parse_order(s["order"].get<std::string>());
      if (s.contains("neighbor_window")) c.chain.neighbor_window = s["neighbor_window"].get<double>();
    }
    if (j.contains("evaluate")) {
      const auto& e = j["evaluate"];
      check_keys(e, {"bin_size", "max_shift"}, "evaluate");
      c.bin_size = e.value("bin_size", c.bin_size);
      c.max_shift = e.value("max_shift", c.max_shift);
    }
    if (j.contains("sweep")) {
      const auto& s = j["sweep"];
      check_keys(s, {"num_configs", "dimensions"}, "sweep");
      c.num_configs = s.value("num_configs", 0);
      for (const auto& d : s.value("dimensions", json::array())) {
        check_keys(d, {"name", "kind", "low", "high", "value"}, "sweep dimension");
        Dimension dim;
        dim.name = d.at("name").get<std::string>();
        dim.kind = parse_kind(d.value("kind", std::string("uniform")));
        if (dim.kind == DimensionKind::fixed) {
          dim.low = dim.high = d.contains("value") ? d["value"].get<double>() : d.at("low").get<double>();
        } else {
          dim.low = d.at("low").get<double>();
          dim.high = d.at("high").get<double>();
        }
        c.search.dimensions.push_back(dim);
      }
    }
    if (j.contains("generate")) {
      const auto& g = j["generate"];
      check_keys(g, {"fixed_bg_rate", "fixed_width"}, "generate");
      if (g.contains("fixed_bg_rate")) c.fixed_bg_rate = g["fixed_bg_rate"].get<double>();
      if (g.contains("fixed_width")) c.fixed_width = g["fixed_width"].get<double>();
    }
    if (j.contains("co_occupancy")) {
      const auto& r = j["co_occupancy"];
      c.co_occupancy = std::make_pair(r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>());
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return c;
}

RunConfig read_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

namespace {

json run_config_json(const RunConfig& c) {
  json j{{"format_version", kFileFormatVersion},
         {"seed", c.seed},
         {"chains", c.chains},
         {"threads", c.chain.threads},
         {"data", c.data_path},
         {"hyperparams", c.chain.hyper},
         {"schedule", c.chain.schedule},
         {"mask", {{"fraction", c.chain.mask_fraction}, {"block_length", c.chain.mask_block_length}}},
         {"sampler", {{"order", order_name(c.chain.order)}}},
         {"evaluate", {{"bin_size", c.bin_size}, {"max_shift", c.max_shift}}}};
  if (std::isfinite(c.chain.neighbor_window))
    j["sampler"]["neighbor_window"] = c.chain.neighbor_window;
  if (!c.search.dimensions.empty() || c.num_configs > 0) {
    json dims = json::array();
    for (const auto& d : c.search.dimensions)
      dims.push_back({{"name", d.name}, {"kind", kind_name(d.kind)}, {"low", d.low}, {"high", d.high}});
    j["sweep"] = {{"num_configs", c.num_configs}, {"dimensions", dims}};
  }
  if (c.fixed_bg_rate || c.fixed_width) {
    json g = json::object();
    if (c.fixed_bg_rate) g["fixed_bg_rate"] = *c.fixed_bg_rate;
    if (c.fixed_width) g["fixed_width"] = *c.fixed_width;
    j["generate"] = g;
  }
  if (c.co_occupancy) j["co_occupancy"] = {c.co_occupancy->first, c.co_occupancy->second};
  return j;
}

}  // namespace

std::string run_config_to_json(const RunConfig& config) { return run_config_json(config).dump(2); }

std::string provenance(const std::string& format, const RunConfig& config, std::uint64_t seed) {
  json j{{"format", format},
         {"version", kFileFormatVersion},
         {"generator", "ppseq " PPSEQ_VERSION},
         {"seed", seed},
         {"config", run_config_json(config)}};
  return j.dump();
}

void write_truth(std::ostream& out, const Simulation& sim, const std::string& prov) {
  json j{{"provenance", json::parse(prov)},
         {"num_neurons", sim.data.num_neurons},
         {"duration", sim.data.duration},
         {"discarded_spikes", sim.truth.discarded},
         {"events", sim.truth.events},
         {"parents", encode_rle(sim.truth.parents)},
         {"params", sim.params}};
  out << j.dump(1) << '\n';
}

GroundTruth read_truth(const std::string& path) {
  auto in = open_input(path, "ground-truth");
  try {
    const json j = json::parse(in);
    GroundTruth t;
    t.events = j.at("events").get<std::vector<LatentEvent>>();
    t.parents = decode_rle(j.at("parents"));
    t.discarded = j.value("discarded_spikes", std::size_t{0});
    return t;
  } catch (const json::exception& e) {
    throw DataError("malformed ground-truth file '" + path + "': " + e.what());
  }
}

void write_samples(std::ostream& out, const PosteriorSummary& summary, const std::string& prov) {
  out << prov << '\n';
  for (const auto& s : summary.samples) out << sample_to_json(s).dump() << '\n';
}

std::vector<PosteriorSample> read_samples(const std::string& path, std::string* header) {
  auto in = open_input(path, "sample");
  std::vector<PosteriorSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      throw DataError(path + ":" + std::to_string(lineno) + ": not a JSON object");
    }
    if (lineno == 1) {
      if (j.value("format", std::string()) != "ppseq-samples")
        throw DataError(path + ": not a ppseq sample file");
      if (j.value("version", -1) != kFileFormatVersion)
        throw DataError(path + ": unsupported sample format version");
      if (header) *header = line;
      continue;
    }
    try {
      out.push_back(sample_from_json(j));
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_mask_csv(std::ostream& out, const SpeckledMask& mask, const std::string& prov) {
  comment_line(out, prov);
  out << "neuron,start,end\n";
  out << std::setprecision(17);
  for (const auto& b : mask.blocks()) out << b.neuron + 1 << ',' << b.start << ',' << b.end << '\n';
}

SpeckledMask read_mask_csv(const std::string& path, int num_neurons, double duration) {
  auto in = open_input(path, "mask");
  std::vector<TimeBlock> blocks;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header) {
      if (t != "neuron,start,end")
        throw DataError(path + ":" + std::to_string(lineno) + ": expected header 'neuron,start,end'");
      header = true;
      continue;
    }
    std::istringstream row(t);
    std::string a, b, c;
    TimeBlock blk;
    try {
      if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
        throw std::invalid_argument(t);
      blk.neuron = std::stoi(a) - 1;
      blk.start = std::stod(b);
      blk.end = std::stod(c);
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(lineno) + ": cannot parse '" + t + "'");
    }
    blocks.push_back(blk);
  }
  try {
    return SpeckledMask(num_neurons, duration, std::move(blocks));
  } catch (const std::invalid_argument& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_trace_csv(std::ostream& out, const PosteriorSummary& s, const std::string& prov) {
  comment_line(out, prov);
  out << "sweep,temperature,num_clusters,background_spikes,train_log_likelihood,split_merge_accepted\n";
  out << std::setprecision(17);
  for (const auto& t : s.trace)
    out << t.sweep << ',' << t.temperature << ',' << t.num_clusters << ',' << t.background << ','
        << t.train_log_likelihood << ',' << t.split_merge_accepted << '\n';
}

void write_k_histogram_csv(std::ostream& out, const PosteriorSummary& s, const std::string& prov) {
  comment_line(out, prov);
  out << "num_clusters,count\n";
  for (const auto& [k, n] : s.k_histogram()) out << k << ',' << n << '\n';
}

void write_roc_csv(std::ostream& out, std::span<const RocPoint> curve, const std::string& prov) {
  comment_line(out, prov);
  out << "threshold,false_positive_rate,true_positive_rate\n";
  out << std::setprecision(17);
  for (const auto& p : curve)
    out << p.threshold << ',' << p.false_positive_rate << ',' << p.true_positive_rate << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const std::string& prov) {
  comment_line(out, prov);
  std::vector<std::string> names;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.point)
      if (std::find(names.begin(), names.end(), k) == names.end()) names.push_back(k);
  std::sort(names.begin(), names.end());
  out << "rank,index,seed";
  for (const auto& n : names) out << ',' << n;
  out << ",train_log_likelihood,validation_score,runtime_seconds,error\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << i + 1 << ',' << r.index << ',' << r.seed;
    for (const auto& n : names) {
      out << ',';
      if (auto it = r.point.find(n); it != r.point.end()) out << it->second;
    }
    if (r.error) {
      std::string msg = *r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out << ",,," << r.runtime_seconds << ',' << msg << '\n';
    } else {
      out << ',' << r.train_log_likelihood << ',' << r.validation_score << ',' << r.runtime_seconds
          << ",\n";
    }
  }
}

void write_co_occupancy_csv(std::ostream& out, const std::vector<double>& m, std::size_t first,
                            std::size_t size, const std::string& prov) {
  comment_line(out, prov);
  out << "spike_i,spike_j,probability\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j)
      out << first + i << ',' << first + j << ',' << m[i * size + j] << '\n';
}

void write_fit_report(std::ostream& out, const std::vector<PosteriorSummary>& chains,
                      const std::string& prov) {
  json arr = json::array();
  for (const auto& c : chains) {
    json j{{"samples", c.samples.size()},
           {"split_merge",
            {{"proposed", c.split_merge.proposed},
             {"accepted", c.split_merge.accepted},
             {"splits", c.split_merge.splits},
             {"merges", c.split_merge.merges}}}};
    json hist = json::object();
    for (const auto& [k, n] : c.k_histogram()) hist[std::to_string(k)] = n;
    j["k_histogram"] = hist;
    if (c.heldout) {
      j["heldout"] = {{"excess_nats_per_second", c.heldout->excess_nats_per_second},
                      {"model_log_likelihood", c.heldout->model_log_likelihood},
                      {"baseline_log_likelihood", c.heldout->baseline_log_likelihood},
                      {"masked_area", c.heldout->masked_area},
                      {"test_spikes", c.heldout->test_spikes}};
    }
    arr.push_back(j);
  }
  out << json{{"provenance", json::parse(prov)}, {"chains", arr}}.dump(2) << '\n';
}

}  // namespace ppseq
