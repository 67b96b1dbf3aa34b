#include "ppseq/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json_convert.hpp"

namespace ppseq {

std::string serialize_checkpoint(const ChainCheckpoint& cp) {
  json shards = json::array();
  for (const auto& sh : cp.shards) {
    json slots = json::array();
    for (const auto& s : sh.slots)
      slots.push_back(json{{"live", s.live}, {"anchor", s.anchor}, {"event", s.event},
                           {"members", s.members}});
    shards.push_back(json{{"spikes", sh.spikes},
                          {"num_observed", sh.num_observed},
                          {"labels", sh.labels},
                          {"slots", slots},
                          {"live", sh.live},
                          {"free", sh.free_list}});
  }
  json j{{"format", "ppseq-checkpoint"},
         {"format_version", cp.format_version},
         {"seed", cp.seed},
         {"next_sweep", cp.next_sweep},
         {"master_rng", cp.master_rng},
         {"shard_rngs", cp.shard_rngs},
         {"params", cp.params},
         {"shards", shards},
         {"summary", summary_to_json(cp.summary)}};
  // Doubles are written in shortest round-trip form.
  return j.dump();
}

ChainCheckpoint parse_checkpoint(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint: malformed JSON: ") + e.what());
  }
  const int version = j.value("format_version", -1);
  if (version != ChainCheckpoint::kFormatVersion)
    throw CheckpointError("checkpoint: format version " + std::to_string(version) +
                             " is not supported (expected " +
                             std::to_string(ChainCheckpoint::kFormatVersion) + ")");
  try {
    ChainCheckpoint cp;
    cp.format_version = version;
    cp.seed = j.at("seed").get<std::uint64_t>();
    cp.next_sweep = j.at("next_sweep").get<int>();
    cp.master_rng = j.at("master_rng").get<std::string>();
    cp.shard_rngs = j.at("shard_rngs").get<std::vector<std::string>>();
    cp.params = j.at("params").get<GlobalParams>();
    for (const auto& sj : j.at("shards")) {
      ChainCheckpoint::Shard sh;
      sh.spikes = sj.at("spikes").get<std::vector<Spike>>();
      sh.num_observed = sj.at("num_observed").get<std::size_t>();
      sh.labels = sj.at("labels").get<std::vector<int>>();
      for (const auto& s : sj.at("slots"))
        sh.slots.push_back({s.at("live").get<bool>(), s.at("anchor").get<double>(),
                            s.at("event").get<LatentEvent>(),
                            s.at("members").get<std::vector<int>>()});
      sh.live = sj.at("live").get<std::vector<int>>();
      sh.free_list = sj.at("free").get<std::vector<int>>();
      cp.shards.push_back(std::move(sh));
    }
    cp.summary = summary_from_json(j.at("summary"));
    return cp;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint: ") + e.what());
  }
}

void write_checkpoint(const std::string& path, const ChainCheckpoint& checkpoint) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw CheckpointError("cannot write checkpoint " + tmp);
    out << serialize_checkpoint(checkpoint);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw CheckpointError("cannot move checkpoint into place at " + path);
}

ChainCheckpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read checkpoint " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_checkpoint(ss.str());
}

}  // namespace ppseq
