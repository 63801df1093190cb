#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qprep/rl/adam.hpp"
#include "qprep/rl/agent.hpp"

namespace qprep::rl {

struct ExplorationSchedule {
  double start = 1.0;
  double end = 0.05;
  /// Fraction of the update budget over which epsilon decays linearly.
  double fraction = 0.4;

  double at(std::int64_t update, std::int64_t budget) const;
};

struct TrainConfig {
  double gamma = 0.997;
  int batch_size = 32;
  AdamConfig adam{};
  double replay_ratio = 1.0;
  int n_step = 5;
  int target_period = 500;
  ExplorationSchedule exploration{};
  DuelingMode dueling = DuelingMode::Sum;
  LossKind loss = LossKind::MeanSquared;
  bool value_rescaling = false;
  int hidden1 = 512;
  int hidden2 = 512;
  int lstm = 512;
  bool one_hot_history = false;
  ReplayConfig replay{};
  /// Learner updates to perform.
  std::int64_t updates = 2000;
  /// Sequences in the buffer before learning starts (0 means batch_size).
  int min_replay = 0;
  /// Episodes collected per acting round; independent of the thread count.
  int actors = 1;
  int threads = 1;
  int eval_interval = 100;
  /// Greedy evaluation is deterministic; more episodes only help with eval_epsilon > 0.
  int eval_episodes = 1;
  double eval_epsilon = 0.0;
  int checkpoint_interval = 0;

  void validate() const;
};

NetworkShape network_shape(const TrainConfig& tc, const env::EnvConfig& ec);

struct CurveRow {
  std::int64_t update = 0;
  std::int64_t episodes = 0;
  std::int64_t env_steps = 0;
  double epsilon = 0.0;
  /// Mean training loss over the updates since the previous row (NaN at update 0).
  double loss = 0.0;
  /// Medians over the evaluation episodes.
  double eval_total_reward = 0.0;
  std::vector<double> eval_deviation;
};

/// Everything needed to continue training.
struct TrainState {
  QNetwork online;
  QNetwork target;
  Adam adam;
  std::int64_t updates = 0;
  std::int64_t episodes = 0;
  std::int64_t collected_steps = 0;
  std::int64_t trained_steps = 0;
  std::mt19937_64 learner_rng;
};

struct TrainHooks {
  std::function<void(const CurveRow&)> on_row;
  /// Called every checkpoint_interval updates, at the end ("final"), and with
  /// "diagnostic" before a numerical-health failure is rethrown.
  std::function<void(const TrainState&, const std::string& tag)> checkpoint;
};

struct TrainResult {
  std::vector<CurveRow> curve;
  TrainState state;
  EpisodeResult final_eval;
  std::vector<int> protocol;
};

/// Greedy evaluation: medians of total reward and per-observable final deviation.
CurveRow evaluate(const QNetwork& net, env::Environment& env, const TrainConfig& tc, std::uint64_t seed,
                  std::int64_t update);

/// Fresh state: online network initialized from the seed, target a copy.
TrainState initial_state(const TrainConfig& tc, const env::EnvConfig& ec, std::uint64_t seed);

/// Deterministic for a fixed (configs, seed) regardless of tc.threads.
TrainResult train(const env::EnvConfig& ec, const env::EnsembleTarget& target, const TrainConfig& tc,
                  std::uint64_t seed, const TrainHooks& hooks = {}, const TrainState* resume = nullptr);

/// Per-episode RNG stream derived from (seed, episode index).
std::mt19937_64 episode_rng(std::uint64_t seed, std::int64_t episode);

double median(std::vector<double> v);

}  // namespace qprep::rl
