#include "ppseq/chain_state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ppseq {

ChainState::ChainState(const Hyperparams& hyper, const WarpGrid& grid, const GlobalParams& params,
                       std::vector<Spike> spikes, double t_lo, double t_hi)
    : ctx_(hyper, grid),
      t_lo_(t_lo),
      t_hi_(t_hi),
      spikes_(std::move(spikes)),
      num_observed_(spikes_.size()),
      labels_(spikes_.size(), kBackground),
      member_pos_(spikes_.size(), -1) {
  ctx_.set_params(params);
}

void ChainState::set_params(const GlobalParams& params) {
  ctx_.set_params(params);
  rebuild();
}

void ChainState::rebuild_cluster(int id) {
  auto& c = slots_[id - 1];
  c.stats.reset(c.stats.anchor(), ctx_.num_hypotheses());
  for (int i : c.members) c.stats.add(spikes_[i], ctx_);
  c.stats.refresh(ctx_);
}

void ChainState::rebuild() {
  for (int id : live_) rebuild_cluster(id);
  rebuild_buckets();
}

std::size_t ChainState::background_size() const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), kBackground));
}

int ChainState::create_cluster(double anchor) {
  int id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
  } else {
    slots_.emplace_back();
    id = static_cast<int>(slots_.size());
  }
  auto& c = slots_[id - 1];
  c.live = true;
  c.stats.reset(anchor, ctx_.num_hypotheses());
  c.members.clear();
  c.event = LatentEvent{anchor, 0, 1.0, 0};
  c.live_pos = static_cast<int>(live_.size());
  live_.push_back(id);
  bucket_insert(id);
  return id;
}

void ChainState::delete_cluster(int id) {
  auto& c = slots_[id - 1];
  bucket_erase(id);
  const int pos = c.live_pos;
  const int moved = live_.back();
  live_[pos] = moved;
  slots_[moved - 1].live_pos = pos;
  live_.pop_back();
  c.live = false;
  c.live_pos = -1;
  c.members.clear();
  free_.push_back(id);
}

void ChainState::unassign(std::size_t i) {
  const int id = labels_[i];
  labels_[i] = kUnassigned;
  if (id <= 0) return;
  auto& c = slots_[id - 1];
  const int pos = member_pos_[i];
  const int last = c.members.back();
  c.members[pos] = last;
  member_pos_[last] = pos;
  c.members.pop_back();
  member_pos_[i] = -1;
  if (c.members.empty()) {
    delete_cluster(id);
    return;
  }
  c.stats.remove(spikes_[i], ctx_);
  c.stats.refresh(ctx_);
  bucket_update(id);
}

void ChainState::assign(std::size_t i, int label) {
  if (labels_[i] != kUnassigned) unassign(i);
  labels_[i] = label;
  if (label <= 0) return;
  auto& c = slots_[label - 1];
  member_pos_[i] = static_cast<int>(c.members.size());
  c.members.push_back(static_cast<int>(i));
  c.stats.add(spikes_[i], ctx_);
  c.stats.refresh(ctx_);
  bucket_update(label);
}

void ChainState::assign_all(std::span<const int> labels) {
  if (labels.size() != spikes_.size())
    throw std::invalid_argument("assign_all: label count does not match spike count");
  for (std::size_t i = 0; i < spikes_.size(); ++i) unassign(i);
  std::vector<std::pair<int, int>> map;  // user label -> cluster id
  for (std::size_t i = 0; i < spikes_.size(); ++i) {
    const int l = labels[i];
    if (l <= 0) {
      assign(i, kBackground);
      continue;
    }
    auto it = std::find_if(map.begin(), map.end(), [&](const auto& p) { return p.first == l; });
    int id;
    if (it == map.end()) {
      id = create_cluster(spikes_[i].time);
      map.emplace_back(l, id);
    } else {
      id = it->second;
    }
    assign(i, id);
  }
}

void ChainState::append_imputed(std::span<const Spike> spikes, std::span<const int> labels) {
  for (std::size_t j = 0; j < spikes.size(); ++j) {
    spikes_.push_back(spikes[j]);
    labels_.push_back(kUnassigned);
    member_pos_.push_back(-1);
    assign(spikes_.size() - 1, labels[j]);
  }
}

void ChainState::clear_imputed() {
  for (std::size_t i = num_observed_; i < spikes_.size(); ++i) unassign(i);
  spikes_.resize(num_observed_);
  labels_.resize(num_observed_);
  member_pos_.resize(num_observed_);
}

void ChainState::set_neighbor_window(double window) {
  if (!(window > 0.0)) throw std::invalid_argument("neighbor window must be positive");
  window_ = window;
  rebuild_buckets();
}

int ChainState::bucket_of(double t) const {
  const double b = std::floor((t - t_lo_) / window_);
  const double last = static_cast<double>(buckets_.size() - 1);
  return static_cast<int>(std::clamp(b, 0.0, last));
}

void ChainState::bucket_insert(int id) {
  if (buckets_.empty()) return;
  auto& c = slots_[id - 1];
  c.bucket = bucket_of(c.stats.center());
  c.bucket_pos = static_cast<int>(buckets_[c.bucket].size());
  buckets_[c.bucket].push_back(id);
}

void ChainState::bucket_erase(int id) {
  if (buckets_.empty()) return;
  auto& c = slots_[id - 1];
  auto& b = buckets_[c.bucket];
  const int moved = b.back();
  b[c.bucket_pos] = moved;
  slots_[moved - 1].bucket_pos = c.bucket_pos;
  b.pop_back();
  c.bucket = -1;
  c.bucket_pos = -1;
}

void ChainState::bucket_update(int id) {
  if (buckets_.empty()) return;
  if (bucket_of(slots_[id - 1].stats.center()) == slots_[id - 1].bucket) return;
  bucket_erase(id);
  bucket_insert(id);
}

void ChainState::rebuild_buckets() {
  buckets_.clear();
  if (!std::isfinite(window_)) return;
  const double span = std::max(t_hi_ - t_lo_, window_);
  buckets_.resize(static_cast<std::size_t>(std::ceil(span / window_)) + 1);
  for (int id : live_) bucket_insert(id);
}

void ChainState::restore_layout(std::vector<Spike> spikes, std::size_t num_observed,
                                std::vector<int> labels, std::vector<ClusterSlot> slots,
                                std::vector<int> live, std::vector<int> free_list) {
  spikes_ = std::move(spikes);
  num_observed_ = num_observed;
  labels_ = std::move(labels);
  slots_ = std::move(slots);
  live_ = std::move(live);
  free_ = std::move(free_list);
  member_pos_.assign(spikes_.size(), -1);
  for (std::size_t k = 0; k < live_.size(); ++k) {
    auto& c = slots_[live_[k] - 1];
    c.live = true;
    c.live_pos = static_cast<int>(k);
    for (std::size_t m = 0; m < c.members.size(); ++m) member_pos_[c.members[m]] = static_cast<int>(m);
  }
  rebuild();
  check_consistency();
}

void ChainState::check_consistency(double tol) const {
  auto fail = [](const std::string& what) { throw std::logic_error("chain state: " + what); };
  std::size_t clustered = 0;
  for (std::size_t k = 0; k < live_.size(); ++k) {
    const int id = live_[k];
    const auto& c = slots_[id - 1];
    if (!c.live || c.live_pos != static_cast<int>(k)) fail("live list out of sync");
    if (c.members.empty()) fail("empty live cluster");
    if (c.stats.size() != static_cast<int>(c.members.size())) fail("cluster size mismatch");
    for (std::size_t m = 0; m < c.members.size(); ++m) {
      const int i = c.members[m];
      if (labels_[i] != id || member_pos_[i] != static_cast<int>(m)) fail("member index mismatch");
    }
    clustered += c.members.size();
    ClusterStats fresh;
    fresh.reset(c.stats.anchor(), ctx_.num_hypotheses());
    for (int i : c.members) fresh.add(spikes_[i], ctx_);
    fresh.refresh(ctx_);
    for (int h = 0; h < ctx_.num_hypotheses(); ++h) {
      if (std::abs(fresh.sum_precision(h) - c.stats.sum_precision(h)) >
              tol * std::max(1.0, std::abs(fresh.sum_precision(h))) ||
          std::abs(fresh.sum_linear(h) - c.stats.sum_linear(h)) >
              tol * std::max(1.0, std::abs(fresh.sum_linear(h))) ||
          std::abs(fresh.sum_log_z(h) - c.stats.sum_log_z(h)) >
              tol * std::max(1.0, std::abs(fresh.sum_log_z(h))) ||
          fresh.zero_weight_count(h) != c.stats.zero_weight_count(h))
        fail("statistics drifted for cluster " + std::to_string(id));
    }
  }
  std::size_t bg = 0;
  for (int l : labels_) {
    if (l == kBackground) ++bg;
    else if (l < 0) fail("unassigned spike");
    else if (!slots_[l - 1].live) fail("label points at a dead cluster");
  }
  if (bg + clustered != spikes_.size()) fail("assignment counts do not add up");
  for (int id : free_)
    if (slots_[id - 1].live) fail("free list holds a live cluster");
}

}  // namespace ppseq
