#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "qprep/rl/network.hpp"

namespace qprep::rl {

/// One acted episode: the actions and rewards are enough to rebuild every
/// observation.
struct EpisodeRecord {
  std::int64_t id = 0;
  std::vector<int> actions;
  std::vector<double> rewards;

  int length() const { return static_cast<int>(actions.size()); }
  /// Observation before step t (t in [0, length]).
  env::Observation observation(int t, int history_length) const;
};

/// A training window [start, start + length) of an episode, preceded by up to
/// burn_in steps used only to warm the LSTM. `state` is the recurrent state
/// recorded while acting, at step start - burn_in.
struct ReplaySequence {
  std::shared_ptr<const EpisodeRecord> episode;
  int start = 0;
  int length = 0;
  int burn_in = 0;
  LstmState state;
  double priority = 1.0;

  int burn_in_start() const { return start - burn_in; }
};

/// Cuts an episode into consecutive windows of `sequence_length` steps.
/// `states[t]` must hold the acting-time state before step t for every t at
/// which a window's burn-in begins (other entries may be empty).
std::vector<ReplaySequence> split_episode(std::shared_ptr<const EpisodeRecord> episode,
                                          const std::vector<LstmState>& states, int sequence_length, int burn_in);

/// Steps t at which split_episode needs a stored state.
std::vector<int> state_positions(int episode_length, int sequence_length, int burn_in);

struct ReplayConfig {
  int capacity = 4096;  // sequences
  int sequence_length = 40;
  int burn_in = 8;
  bool prioritized = false;
  double priority_exponent = 0.9;
  double importance_exponent = 0.6;
  /// R2D2 mixes max and mean |TD| into the sequence priority.
  double priority_eta = 0.9;
};

struct SampledBatch {
  std::vector<std::size_t> indices;
  /// Importance weights, normalized to max 1 (all 1 for uniform sampling).
  std::vector<double> weights;
};

/// FIFO store of sequences with uniform or proportional sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(const ReplayConfig& cfg = {});

  void add(ReplaySequence s);
  std::size_t size() const { return items_.size(); }
  const ReplaySequence& at(std::size_t i) const { return items_.at(i); }
  const ReplayConfig& config() const { return cfg_; }
  /// Total sequences ever added.
  std::int64_t added() const { return added_; }

  SampledBatch sample(std::size_t batch, std::mt19937_64& rng) const;
  void update_priority(std::size_t index, double priority);

 private:
  ReplayConfig cfg_;
  std::vector<ReplaySequence> items_;
  std::size_t next_ = 0;
  std::int64_t added_ = 0;
  double max_priority_ = 1.0;
};

}  // namespace qprep::rl
