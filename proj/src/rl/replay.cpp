#include "qprep/rl/replay.hpp"

#include <algorithm>
#include <cmath>

#include "qprep/core/error.hpp"

namespace qprep::rl {

env::Observation EpisodeRecord::observation(int t, int history_length) const {
  QPREP_REQUIRE(t >= 0 && t <= length(), "EpisodeRecord::observation: step out of range");
  QPREP_REQUIRE(length() <= history_length, "EpisodeRecord::observation: episode longer than the history");
  env::Observation o;
  o.history.assign(static_cast<std::size_t>(history_length), -1);
  for (int s = 0; s < t; ++s) o.history[static_cast<std::size_t>(s)] = actions[static_cast<std::size_t>(s)];
  if (t > 0) {
    o.prev_action = actions[static_cast<std::size_t>(t - 1)];
    o.prev_reward = rewards[static_cast<std::size_t>(t - 1)];
  }
  o.step = t;
  return o;
}

std::vector<int> state_positions(int episode_length, int sequence_length, int burn_in) {
  QPREP_REQUIRE(sequence_length >= 1 && burn_in >= 0, "state_positions: invalid window sizes");
  std::vector<int> out;
  for (int start = 0; start < episode_length; start += sequence_length) out.push_back(std::max(0, start - burn_in));
  return out;
}

std::vector<ReplaySequence> split_episode(std::shared_ptr<const EpisodeRecord> episode,
                                          const std::vector<LstmState>& states, int sequence_length, int burn_in) {
  QPREP_REQUIRE(episode != nullptr, "split_episode: null episode");
  QPREP_REQUIRE(static_cast<int>(states.size()) >= episode->length(), "split_episode: missing acting states");
  std::vector<ReplaySequence> out;
  for (int start = 0; start < episode->length(); start += sequence_length) {
    ReplaySequence s;
    s.episode = episode;
    s.start = start;
    s.length = std::min(sequence_length, episode->length() - start);
    s.burn_in = std::min(burn_in, start);
    s.state = states[static_cast<std::size_t>(s.burn_in_start())];
    QPREP_REQUIRE(s.state.h.size() > 0, "split_episode: state at step " + std::to_string(s.burn_in_start()) + " was not stored");
    out.push_back(std::move(s));
  }
  return out;
}

ReplayBuffer::ReplayBuffer(const ReplayConfig& cfg) : cfg_(cfg) {
  QPREP_REQUIRE(cfg.capacity >= 1, "replay: capacity must be positive");
  QPREP_REQUIRE(cfg.sequence_length >= 1 && cfg.burn_in >= 0, "replay: invalid sequence sizes");
  items_.reserve(static_cast<std::size_t>(std::min(cfg.capacity, 1 << 16)));
}

void ReplayBuffer::add(ReplaySequence s) {
  s.priority = max_priority_;
  if (static_cast<int>(items_.size()) < cfg_.capacity) {
    items_.push_back(std::move(s));
  } else {
    items_[next_] = std::move(s);
    next_ = (next_ + 1) % items_.size();
  }
  ++added_;
}

SampledBatch ReplayBuffer::sample(std::size_t batch, std::mt19937_64& rng) const {
  QPREP_REQUIRE(!items_.empty(), "replay: cannot sample from an empty buffer");
  SampledBatch out;
  out.indices.resize(batch);
  out.weights.assign(batch, 1.0);
  if (!cfg_.prioritized) {
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    for (auto& i : out.indices) i = pick(rng);
    return out;
  }
  std::vector<double> cumulative(items_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    total += std::pow(items_[i].priority, cfg_.priority_exponent);
    cumulative[i] = total;
  }
  std::uniform_real_distribution<double> u(0.0, total);
  double max_w = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const double x = u(rng);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), items_.size() - 1);
    out.indices[b] = i;
    const double p = std::pow(items_[i].priority, cfg_.priority_exponent) / total;
    out.weights[b] = std::pow(static_cast<double>(items_.size()) * p, -cfg_.importance_exponent);
    max_w = std::max(max_w, out.weights[b]);
  }
  for (auto& w : out.weights) w /= max_w;
  return out;
}

void ReplayBuffer::update_priority(std::size_t index, double priority) {
  QPREP_REQUIRE(index < items_.size(), "replay: priority index out of range");
  QPREP_REQUIRE(std::isfinite(priority) && priority >= 0.0, "replay: priority must be finite and non-negative");
  items_[index].priority = std::max(priority, 1e-8);
  max_priority_ = std::max(max_priority_, items_[index].priority);
}

}  // namespace qprep::rl
