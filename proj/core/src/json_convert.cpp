#include "json_convert.hpp"

#include <limits>
#include <stdexcept>

namespace ppseq {

namespace {

template <class T>
void read_optional(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->template get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* where) {
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw std::invalid_argument(std::string("unknown key '") + k + "' in " + where);
  }
}

}  // namespace

void from_json(const json& j, Hyperparams& h) {
  reject_unknown(j,
                 {"num_neurons", "num_types", "duration", "event_rate", "amplitude_shape",
                  "amplitude_rate", "type_concentration", "weight_concentration", "width_dof",
                  "width_scale", "delay_precision", "bg_shape", "bg_rate", "bg_concentration",
                  "num_warps", "max_warp", "warp_variance", "split_merge_window"},
                 "hyperparams");
  read_optional(j, "num_neurons", h.num_neurons);
  read_optional(j, "num_types", h.num_types);
  read_optional(j, "duration", h.duration);
  read_optional(j, "event_rate", h.event_rate);
  read_optional(j, "amplitude_shape", h.amplitude_shape);
  read_optional(j, "amplitude_rate", h.amplitude_rate);
  read_optional(j, "type_concentration", h.type_concentration);
  read_optional(j, "weight_concentration", h.weight_concentration);
  read_optional(j, "width_dof", h.width_dof);
  read_optional(j, "width_scale", h.width_scale);
  read_optional(j, "delay_precision", h.delay_precision);
  read_optional(j, "bg_shape", h.bg_shape);
  read_optional(j, "bg_rate", h.bg_rate);
  read_optional(j, "bg_concentration", h.bg_concentration);
  read_optional(j, "num_warps", h.num_warps);
  read_optional(j, "max_warp", h.max_warp);
  read_optional(j, "warp_variance", h.warp_variance);
  h.split_merge_window = std::numeric_limits<double>::infinity();
  read_optional(j, "split_merge_window", h.split_merge_window);
}

void from_json(const json& j, AnnealSchedule& s) {
  reject_unknown(j,
                 {"initial_temperature", "num_stages", "sweeps_per_stage", "final_sweeps",
                  "split_merge_moves", "anneal_split_merge_moves", "retained", "thin"},
                 "schedule");
  read_optional(j, "initial_temperature", s.initial_temperature);
  read_optional(j, "num_stages", s.num_stages);
  read_optional(j, "sweeps_per_stage", s.sweeps_per_stage);
  read_optional(j, "final_sweeps", s.final_sweeps);
  read_optional(j, "split_merge_moves", s.split_merge_moves);
  read_optional(j, "anneal_split_merge_moves", s.anneal_split_merge_moves);
  read_optional(j, "retained", s.retained);
  read_optional(j, "thin", s.thin);
}

json encode_rle(const std::vector<int>& values) {
  json out = json::array();
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t k = i;
    while (k < values.size() && values[k] == values[i]) ++k;
    out.push_back(json::array({values[i], k - i}));
    i = k;
  }
  return out;
}

std::vector<int> decode_rle(const json& j) {
  std::vector<int> out;
  for (const auto& run : j) {
    const int v = run.at(0).get<int>();
    const auto n = run.at(1).get<std::size_t>();
    out.insert(out.end(), n, v);
  }
  return out;
}

json sample_to_json(const PosteriorSample& s) {
  return json{{"sweep", s.sweep},
              {"train_log_likelihood", s.train_log_likelihood},
              {"num_events", s.events.size()},
              {"events", s.events},
              {"assignments", encode_rle(s.assignments)},
              {"params", s.params}};
}

PosteriorSample sample_from_json(const json& j) {
  PosteriorSample s;
  s.sweep = j.at("sweep").get<int>();
  s.train_log_likelihood = j.at("train_log_likelihood").get<double>();
  s.events = j.at("events").get<std::vector<LatentEvent>>();
  s.assignments = decode_rle(j.at("assignments"));
  s.params = j.at("params").get<GlobalParams>();
  return s;
}

json summary_to_json(const PosteriorSummary& s) {
  json samples = json::array();
  for (const auto& x : s.samples) samples.push_back(sample_to_json(x));
  json trace = json::array();
  for (const auto& t : s.trace)
    trace.push_back(json::array({t.sweep, t.temperature, t.num_clusters, t.background,
                                 t.train_log_likelihood, t.split_merge_accepted}));
  return json{{"samples", samples},
              {"trace", trace},
              {"split_merge",
               {s.split_merge.proposed, s.split_merge.accepted, s.split_merge.splits,
                s.split_merge.merges}}};
}

PosteriorSummary summary_from_json(const json& j) {
  PosteriorSummary s;
  for (const auto& x : j.at("samples")) s.samples.push_back(sample_from_json(x));
  for (const auto& t : j.at("trace"))
    s.trace.push_back({t.at(0).get<int>(), t.at(1).get<double>(), t.at(2).get<int>(),
                       t.at(3).get<std::size_t>(), t.at(4).get<double>(), t.at(5).get<int>()});
  const auto& sm = j.at("split_merge");
  s.split_merge = {sm.at(0).get<int>(), sm.at(1).get<int>(), sm.at(2).get<int>(),
                   sm.at(3).get<int>()};
  return s;
}

}  // namespace ppseq
