// JSON conversions shared by checkpoints and the file formats.
#pragma once

#include <json.hpp>

#include "ppseq/anneal.hpp"
#include "ppseq/driver.hpp"
#include "ppseq/types.hpp"

namespace ppseq {

using json = nlohmann::ordered_json;

inline void to_json(json& j, const Spike& s) { j = json::array({s.neuron, s.time}); }
inline void from_json(const json& j, Spike& s) {
  s.neuron = j.at(0).get<int>();
  s.time = j.at(1).get<double>();
}

inline void to_json(json& j, const LatentEvent& e) {
  j = json{{"time", e.time}, {"type", e.type + 1}, {"amplitude", e.amplitude}, {"warp", e.warp + 1}};
}
inline void from_json(const json& j, LatentEvent& e) {
  e.time = j.at("time").get<double>();
  e.type = j.at("type").get<int>() - 1;
  e.amplitude = j.at("amplitude").get<double>();
  e.warp = j.at("warp").get<int>() - 1;
}

inline void to_json(json& j, const GlobalParams& p) {
  j = json{{"num_neurons", p.num_neurons}, {"num_types", p.num_types},
           {"bg_rates", p.bg_rates},       {"type_probs", p.type_probs},
           {"weights", p.weights},         {"delays", p.delays},
           {"widths", p.widths}};
}
inline void from_json(const json& j, GlobalParams& p) {
  p.num_neurons = j.at("num_neurons").get<int>();
  p.num_types = j.at("num_types").get<int>();
  p.bg_rates = j.at("bg_rates").get<std::vector<double>>();
  p.type_probs = j.at("type_probs").get<std::vector<double>>();
  p.weights = j.at("weights").get<std::vector<double>>();
  p.delays = j.at("delays").get<std::vector<double>>();
  p.widths = j.at("widths").get<std::vector<double>>();
}

// Hyperparams keys double as the config-file vocabulary.
inline void to_json(json& j, const Hyperparams& h) {
  j = json{{"num_neurons", h.num_neurons},
           {"num_types", h.num_types},
           {"duration", h.duration},
           {"event_rate", h.event_rate},
           {"amplitude_shape", h.amplitude_shape},
           {"amplitude_rate", h.amplitude_rate},
           {"type_concentration", h.type_concentration},
           {"weight_concentration", h.weight_concentration},
           {"width_dof", h.width_dof},
           {"width_scale", h.width_scale},
           {"delay_precision", h.delay_precision},
           {"bg_shape", h.bg_shape},
           {"bg_rate", h.bg_rate},
           {"bg_concentration", h.bg_concentration},
           {"num_warps", h.num_warps},
           {"max_warp", h.max_warp},
           {"warp_variance", h.warp_variance}};
  if (std::isfinite(h.split_merge_window)) j["split_merge_window"] = h.split_merge_window;
}

void from_json(const json& j, Hyperparams& h);

inline void to_json(json& j, const AnnealSchedule& s) {
  j = json{{"initial_temperature", s.initial_temperature},
           {"num_stages", s.num_stages},
           {"sweeps_per_stage", s.sweeps_per_stage},
           {"final_sweeps", s.final_sweeps},
           {"split_merge_moves", s.split_merge_moves},
           {"anneal_split_merge_moves", s.anneal_split_merge_moves},
           {"retained", s.retained},
           {"thin", s.thin}};
}
void from_json(const json& j, AnnealSchedule& s);

/// Run-length encoding [[value, count], ...].
json encode_rle(const std::vector<int>& values);
std::vector<int> decode_rle(const json& j);

json sample_to_json(const PosteriorSample& s);
PosteriorSample sample_from_json(const json& j);
json summary_to_json(const PosteriorSummary& s);
PosteriorSummary summary_from_json(const json& j);

}  // namespace ppseq
