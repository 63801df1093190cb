#pragma once

#include <random>
#include <vector>

#include "qprep/env/environment.hpp"
#include "qprep/rl/network.hpp"
#include "qprep/rl/replay.hpp"

namespace qprep::rl {

enum class LossKind { MeanSquared, Huber };

struct TdConfig {
  double gamma = 0.997;
  int n_step = 5;
  /// R2D2's invertible value transform h(x) = sign(x)(sqrt(|x|+1) - 1) + 1e-3 x.
  bool value_rescaling = false;
  LossKind loss = LossKind::MeanSquared;
};

double value_transform(double x);
double value_transform_inverse(double x);

/// n-step double-Q targets for the first `train_len` steps of a window.
/// Column j of q_online / q_target holds Q at the observation before window
/// step j; rewards[j] is the reward of window step j. `available` is the
/// number of episode steps from the window start to the episode end; the
/// state after the last one is terminal and is never bootstrapped.
std::vector<double> td_targets(const std::vector<double>& rewards, const RealMatrix& q_online,
                               const RealMatrix& q_target, int train_len, int available, const TdConfig& cfg);

/// Epsilon-greedy choice; the uniform draw happens on every call so the RNG
/// stream does not depend on the Q values.
int epsilon_greedy(const RealVector& q, double epsilon, std::mt19937_64& rng);

/// Advances `state` by one step and picks an action.
int act(const QNetwork& net, const StepInput& in, LstmState& state, double epsilon, std::mt19937_64& rng);

struct EpisodeResult {
  std::vector<int> actions;
  std::vector<double> rewards;
  double total_reward = 0.0;
  RealVector final_measurements;
  /// |M_T - M_target| per observable.
  RealVector final_deviation;
  /// Acting-time recurrent states before each step (filled only when requested).
  std::vector<LstmState> states;
};

/// One episode from reset. With epsilon = 0 no RNG is needed.
/// `store_states` lists the steps whose pre-step LSTM state is kept.
EpisodeResult run_episode(const QNetwork& net, env::Environment& env, double epsilon, std::mt19937_64* rng,
                          const std::vector<int>& store_states = {});

/// Deterministic greedy rollout: total_steps action indices.
std::vector<int> extract_protocol(const QNetwork& net, env::Environment& env);

struct BatchLoss {
  double loss = 0.0;
  RealVector grad;
  /// Per-sequence priority from the TD errors.
  std::vector<double> priorities;
  int trained_steps = 0;
};

/// Loss and online-network gradient for a sampled minibatch, with stored-state
/// burn-in and n-step double-Q targets from `target`.
BatchLoss sequence_loss(const QNetwork& online, const QNetwork& target, const ReplayBuffer& replay,
                        const SampledBatch& batch, const TdConfig& td);

}  // namespace qprep::rl
