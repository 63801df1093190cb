#include "qprep/rl/agent.hpp"

#include <algorithm>
#include <cmath>

#include "qprep/core/error.hpp"

namespace qprep::rl {

namespace {
constexpr double kRescaleEps = 1e-3;
}  // namespace

double value_transform(double x) {
  return std::copysign(std::sqrt(std::abs(x) + 1.0) - 1.0, x) + kRescaleEps * x;
}

double value_transform_inverse(double x) {
  const double e = kRescaleEps;
  const double r = (std::sqrt(1.0 + 4.0 * e * (std::abs(x) + 1.0 + e)) - 1.0) / (2.0 * e);
  return std::copysign(r * r - 1.0, x);
}

std::vector<double> td_targets(const std::vector<double>& rewards, const RealMatrix& q_online,
                               const RealMatrix& q_target, int train_len, int available, const TdConfig& cfg) {
  QPREP_REQUIRE(cfg.n_step >= 1, "td_targets: n_step must be positive");
  QPREP_REQUIRE(cfg.gamma > 0.0 && cfg.gamma < 1.0, "td_targets: gamma must lie in (0, 1)");
  QPREP_REQUIRE(train_len >= 0 && train_len <= available, "td_targets: window longer than the episode");
  QPREP_REQUIRE(static_cast<int>(rewards.size()) >= std::min(available, train_len + cfg.n_step - 1),
                "td_targets: missing rewards");
  std::vector<double> y(static_cast<std::size_t>(train_len));
  for (int t = 0; t < train_len; ++t) {
    double acc = 0.0, disc = 1.0;
    const int horizon = std::min(cfg.n_step, available - t);
    for (int j = 0; j < horizon; ++j) {
      acc += disc * rewards[static_cast<std::size_t>(t + j)];
      disc *= cfg.gamma;
    }
    if (t + cfg.n_step < available) {
      QPREP_REQUIRE(q_online.cols() > t + cfg.n_step && q_target.cols() > t + cfg.n_step,
                    "td_targets: missing bootstrap columns");
      const int a = greedy_action(q_online.col(t + cfg.n_step));
      double boot = q_target(a, t + cfg.n_step);
      if (cfg.value_rescaling) boot = value_transform_inverse(boot);
      acc += disc * boot;
    }
    y[static_cast<std::size_t>(t)] = cfg.value_rescaling ? value_transform(acc) : acc;
  }
  return y;
}

int epsilon_greedy(const RealVector& q, double epsilon, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(q.size()) - 1);
    return pick(rng);
  }
  return greedy_action(q);
}

int act(const QNetwork& net, const StepInput& in, LstmState& state, double epsilon, std::mt19937_64& rng) {
  const HeadOutput out = net.step(in, state);
  return epsilon_greedy(out.q.col(0), epsilon, rng);
}

EpisodeResult run_episode(const QNetwork& net, env::Environment& env, double epsilon, std::mt19937_64* rng,
                          const std::vector<int>& store_states) {
  QPREP_REQUIRE(epsilon == 0.0 || rng != nullptr, "run_episode: exploration needs an RNG");
  const NetworkShape& s = net.shape();
  QPREP_REQUIRE(s.n_actions == env.action_count(), "run_episode: network and environment action counts differ");
  EpisodeResult r;
  env::Observation obs = env.reset();
  LstmState state = LstmState::zeros(s.lstm);
  const int steps = env.config().total_steps;
  if (!store_states.empty()) r.states.resize(static_cast<std::size_t>(steps));
  std::size_t next_store = 0;
  StepInput in{RealMatrix(s.input_dim(), 1), RealMatrix(s.aux_dim(), 1)};
  r.actions.reserve(static_cast<std::size_t>(steps));
  r.rewards.reserve(static_cast<std::size_t>(steps));
  for (int t = 0; t < steps; ++t) {
    if (next_store < store_states.size() && store_states[next_store] == t) {
      r.states[static_cast<std::size_t>(t)] = state;
      ++next_store;
    }
    encode_observation(s, obs, in, 0);
    const HeadOutput out = net.step(in, state);
    const int a = epsilon > 0.0 ? epsilon_greedy(out.q.col(0), epsilon, *rng) : greedy_action(out.q.col(0));
    const env::Transition tr = env.step(a);
    r.actions.push_back(a);
    r.rewards.push_back(tr.reward);
    r.total_reward += tr.reward;
    r.final_measurements = tr.measurements;
    obs = tr.next_observation;
  }
  r.final_deviation = (r.final_measurements - env.target().values).cwiseAbs();
  return r;
}

std::vector<int> extract_protocol(const QNetwork& net, env::Environment& env) {
  return run_episode(net, env, 0.0, nullptr).actions;
}

BatchLoss sequence_loss(const QNetwork& online, const QNetwork& target, const ReplayBuffer& replay,
                        const SampledBatch& batch, const TdConfig& td) {
  const NetworkShape& s = online.shape();
  QPREP_REQUIRE(target.shape() == s, "sequence_loss: online and target shapes differ");
  const auto nb = static_cast<Eigen::Index>(batch.indices.size());
  QPREP_REQUIRE(nb >= 1, "sequence_loss: empty batch");

  std::vector<const ReplaySequence*> seqs;
  int max_burn = 0, max_window = 0;
  for (std::size_t i : batch.indices) {
    const ReplaySequence& q = replay.at(i);
    seqs.push_back(&q);
    max_burn = std::max(max_burn, q.burn_in);
    const int available = q.episode->length() - q.start;
    max_window = std::max(max_window, std::min(available, q.length + td.n_step));
  }

  auto blank = [&] { return StepInput{RealMatrix::Zero(s.input_dim(), nb), RealMatrix::Zero(s.aux_dim(), nb)}; };
  LstmState initial = LstmState::zeros(s.lstm, static_cast<int>(nb));
  std::vector<StepInput> burn(static_cast<std::size_t>(max_burn));
  std::vector<Eigen::VectorXi> active(static_cast<std::size_t>(max_burn));
  for (auto& b : burn) b = blank();
  for (auto& m : active) m = Eigen::VectorXi::Zero(nb);
  std::vector<StepInput> window(static_cast<std::size_t>(max_window));
  for (auto& w : window) w = blank();

  for (Eigen::Index b = 0; b < nb; ++b) {
    const ReplaySequence& q = *seqs[static_cast<std::size_t>(b)];
    initial.h.col(b) = q.state.h.col(0);
    initial.c.col(b) = q.state.c.col(0);
    // burn-in steps are right-aligned so every column reaches the window together
    for (int k = 0; k < q.burn_in; ++k) {
      const int slot = max_burn - q.burn_in + k;
      encode_observation(s, q.episode->observation(q.burn_in_start() + k, s.history_length), burn[static_cast<std::size_t>(slot)], b);
      active[static_cast<std::size_t>(slot)][b] = 1;
    }
    const int available = q.episode->length() - q.start;
    const int w = std::min(available, q.length + td.n_step);
    for (int j = 0; j < w; ++j) {
      encode_observation(s, q.episode->observation(q.start + j, s.history_length), window[static_cast<std::size_t>(j)], b);
    }
  }

  LstmState on_state = initial, tg_state = initial;
  if (max_burn > 0) {
    online.forward_sequence(burn, on_state, nullptr, &active);
    target.forward_sequence(burn, tg_state, nullptr, &active);
  }
  SequenceCache cache;
  const auto q_on = online.forward_sequence(window, on_state, &cache);
  const auto q_tg = target.forward_sequence(window, tg_state);

  int total_steps = 0;
  for (const auto* q : seqs) total_steps += q->length;
  std::vector<RealMatrix> dq(static_cast<std::size_t>(max_window), RealMatrix::Zero(s.n_actions, nb));
  BatchLoss out;
  out.priorities.resize(static_cast<std::size_t>(nb));
  out.trained_steps = total_steps;
  for (Eigen::Index b = 0; b < nb; ++b) {
    const ReplaySequence& q = *seqs[static_cast<std::size_t>(b)];
    const int available = q.episode->length() - q.start;
    const int w = std::min(available, q.length + td.n_step);
    RealMatrix qo(s.n_actions, w), qt(s.n_actions, w);
    for (int j = 0; j < w; ++j) {
      qo.col(j) = q_on[static_cast<std::size_t>(j)].q.col(b);
      qt.col(j) = q_tg[static_cast<std::size_t>(j)].q.col(b);
    }
    const std::vector<double> rewards(q.episode->rewards.begin() + q.start, q.episode->rewards.begin() + q.start + w);
    const std::vector<double> y = td_targets(rewards, qo, qt, q.length, available, td);
    const double weight = batch.weights[static_cast<std::size_t>(b)];
    double max_abs = 0.0, sum_abs = 0.0;
    for (int j = 0; j < q.length; ++j) {
      const int a = q.episode->actions[static_cast<std::size_t>(q.start + j)];
      const double delta = qo(a, j) - y[static_cast<std::size_t>(j)];
      max_abs = std::max(max_abs, std::abs(delta));
      sum_abs += std::abs(delta);
      double g;
      if (td.loss == LossKind::Huber) {
        const double ad = std::abs(delta);
        out.loss += weight * (ad <= 1.0 ? 0.5 * delta * delta : ad - 0.5) / total_steps;
        g = std::clamp(delta, -1.0, 1.0);
      } else {
        out.loss += weight * delta * delta / total_steps;
        g = 2.0 * delta;
      }
      dq[static_cast<std::size_t>(j)](a, b) = weight * g / total_steps;
    }
    const auto& cfg = replay.config();
    out.priorities[static_cast<std::size_t>(b)] =
        cfg.priority_eta * max_abs + (1.0 - cfg.priority_eta) * sum_abs / std::max(q.length, 1);
  }
  out.grad = online.backward_sequence(cache, dq);
  return out;
}

}  // namespace qprep::rl
