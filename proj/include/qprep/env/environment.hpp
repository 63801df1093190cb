#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qprep/env/backends.hpp"
#include "qprep/fermion/gge.hpp"
#include "qprep/pauli/gibbs.hpp"

namespace qprep::env {

enum class RewardNorm { Euclidean, L1, Max };

std::string to_string(RewardNorm n);
RewardNorm parse_reward_norm(const std::string& s);

enum class TargetKind { Gibbs, Gge };

/// How the target values of the reward observables are obtained.
struct TargetSpec {
  TargetKind kind = TargetKind::Gibbs;
  double beta = 0.2;
  /// Gibbs: exact diagonalization up to exact_cap sites, stochastic trace above.
  int exact_cap = 12;
  int samples = 64;
  std::uint64_t seed = 1;
  /// GGE: deviation of the higher LIOM targets, and the largest n it applies
  /// to (< 0 picks min(n_local, L/2 - 1)).
  double epsilon_I = 0.05;
  int deviation_max_n = -1;
  int n_local = 4;
};

/// Target expectation values, one per reward observable (same order).
struct EnsembleTarget {
  std::vector<std::string> names;
  RealVector values;
  /// Ensemble variances where available (Gibbs exact or stochastic), else NaN.
  RealVector variances;
  /// Populated for GGE targets.
  std::optional<fermion::GgeSpec> gge;
  std::string description;
};

struct EnvConfig {
  BackendKind backend = BackendKind::IsingDense;
  int n_sites = 8;
  double dt = 0.1;
  int total_steps = 240;
  double reward_epsilon = 0.05;
  RewardNorm reward_norm = RewardNorm::Euclidean;
  std::vector<std::string> observables{"energy_density", "magnetization_density"};
  double variance_reward_weight = 0.0;
  PhysicsParams physics{};
  TargetSpec target{};

  double total_time() const { return dt * total_steps; }
  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

/// Defaults for the two control problems.
EnvConfig gibbs_env_defaults(int n_sites);
EnvConfig gge_env_defaults(int n_sites);

/// Solves the GGE target for an XX configuration: the deformed-Gibbs moment
/// targets at target.beta, with the feasibility-preserving deviation range.
fermion::GgeSpec solve_target_gge(const EnvConfig& cfg);

/// Nearest even integer to the GGE particle number (even N keeps the
/// antiperiodic sector).
int default_particle_number(const fermion::GgeSpec& spec);

/// Reward-observable targets for `cfg`. Deterministic given cfg.target.seed.
EnsembleTarget compute_target(const EnvConfig& cfg);

struct Observation {
  /// Actions taken so far, padded with -1 to total_steps entries.
  std::vector<int> history;
  int prev_action = -1;
  double prev_reward = 0.0;
  int step = 0;
};

struct Transition {
  Observation observation;
  int action = -1;
  double reward = 0.0;
  Observation next_observation;
  bool done = false;
  /// 1-based: the step that produced this transition.
  int step = 0;
  /// Reward observables after the action.
  RealVector measurements;
};

/// r = 1 / (|m - target| + w * variance_term + eps).
double reward(const RealVector& m, const RealVector& target, double eps, RewardNorm norm,
              double variance_term = 0.0, double variance_weight = 0.0);

double deviation_norm(const RealVector& m, const RealVector& target, RewardNorm norm);

/// The 6 Ising or 15 XX generators, by name in protocol index order.
std::vector<std::string> action_set(const EnvConfig& cfg);

/// One episode at a time: reset, then exactly total_steps calls to step.
class Environment {
 public:
  /// Computes the target unless one is supplied.
  explicit Environment(EnvConfig cfg, std::optional<EnsembleTarget> target = std::nullopt);

  const EnvConfig& config() const { return cfg_; }
  const EnsembleTarget& target() const { return target_; }
  int action_count() const { return backend_->action_count(); }
  int step_index() const { return step_; }
  bool done() const { return step_ >= cfg_.total_steps; }

  Observation reset(std::uint64_t seed = 0);
  Transition step(int action);

  /// Reward observables on the current state.
  RealVector measurements() const;
  /// Any observable the backend knows, measured on the current state.
  double measure(const std::string& name);

  const PhysicsBackend& backend() const { return *backend_; }
  PhysicsBackend& backend() { return *backend_; }
  const Observation& observation() const { return obs_; }

  /// Evolves a copy of the current state under the model Hamiltonian for
  /// round(duration / dt) steps, calling `visit(state, t)` after each step
  /// with t measured from the start of the relaxation. Returns the number of
  /// recorded states. The environment itself is unchanged.
  int free_relaxation(double duration, const std::function<void(PhysicsBackend&, double)>& visit) const;

 private:
  EnvConfig cfg_;
  EnsembleTarget target_;
  std::unique_ptr<PhysicsBackend> backend_;
  std::vector<int> reward_ids_;
  Observation obs_;
  int step_ = 0;
  bool started_ = false;
};

/// Replays a fixed action list from reset and returns the per-step rewards.
std::vector<double> replay_rewards(Environment& env, const std::vector<int>& actions);

}  // namespace qprep::env
