#include "qprep/rl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "qprep/core/error.hpp"
#include "qprep/core/parallel.hpp"

namespace qprep::rl {

double ExplorationSchedule::at(std::int64_t update, std::int64_t budget) const {
  const double span = fraction * static_cast<double>(std::max<std::int64_t>(budget, 1));
  const double x = span > 0.0 ? std::min(1.0, static_cast<double>(update) / span) : 1.0;
  return start + (end - start) * x;
}

void TrainConfig::validate() const {
  auto require = [](bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw InvalidArgument("train." + field + ": " + why);
  };
  require(gamma > 0.0 && gamma < 1.0, "gamma", "must lie in (0, 1)");
  require(batch_size >= 1, "batch_size", "must be positive");
  require(adam.learning_rate > 0.0, "learning_rate", "must be positive");
  require(adam.epsilon > 0.0, "adam_epsilon", "must be positive");
  require(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0, "adam_betas",
          "must lie in [0, 1)");
  require(replay_ratio > 0.0, "replay_ratio", "must be positive");
  require(adam.clip_norm > 0.0, "clip_norm", "must be positive");
  require(n_step >= 1, "n_step", "must be positive");
  require(target_period >= 1, "target_period", "must be positive");
  require(exploration.start >= 0.0 && exploration.start <= 1.0 && exploration.end >= 0.0 && exploration.end <= 1.0,
          "epsilon", "start and end must lie in [0, 1]");
  require(exploration.fraction >= 0.0 && exploration.fraction <= 1.0, "epsilon_fraction", "must lie in [0, 1]");
  require(hidden1 >= 1 && hidden2 >= 1 && lstm >= 1, "widths", "must be positive");
  require(replay.capacity >= 1, "replay_capacity", "must be positive");
  require(replay.sequence_length >= 1, "sequence_length", "must be positive");
  require(replay.burn_in >= 0, "burn_in", "must be non-negative");
  require(updates >= 0, "updates", "must be non-negative");
  require(min_replay >= 0, "min_replay", "must be non-negative");
  require(actors >= 1, "actors", "must be positive");
  require(threads >= 1, "threads", "must be positive");
  require(eval_interval >= 1, "eval_interval", "must be positive");
  require(eval_episodes >= 1, "eval_episodes", "must be positive");
  require(eval_epsilon >= 0.0 && eval_epsilon <= 1.0, "eval_epsilon", "must lie in [0, 1]");
  require(checkpoint_interval >= 0, "checkpoint_interval", "must be non-negative");
}

NetworkShape network_shape(const TrainConfig& tc, const env::EnvConfig& ec) {
  NetworkShape s;
  s.history_length = ec.total_steps;
  s.n_actions = static_cast<int>(env::action_set(ec).size());
  s.hidden1 = tc.hidden1;
  s.hidden2 = tc.hidden2;
  s.lstm = tc.lstm;
  s.one_hot_history = tc.one_hot_history;
  s.dueling = tc.dueling;
  return s;
}

std::mt19937_64 episode_rng(std::uint64_t seed, std::int64_t episode) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(episode), std::uint64_t{0x6570}};
  return std::mt19937_64(seq);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

CurveRow evaluate(const QNetwork& net, env::Environment& env, const TrainConfig& tc, std::uint64_t seed,
                  std::int64_t update) {
  CurveRow row;
  row.update = update;
  std::vector<double> totals;
  std::vector<std::vector<double>> devs(env.target().names.size());
  for (int e = 0; e < tc.eval_episodes; ++e) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(update), static_cast<std::uint64_t>(e), std::uint64_t{0x6576}};
    std::mt19937_64 rng(seq);
    const EpisodeResult r = run_episode(net, env, tc.eval_epsilon, &rng);
    totals.push_back(r.total_reward);
    for (std::size_t k = 0; k < devs.size(); ++k) devs[k].push_back(r.final_deviation[static_cast<Eigen::Index>(k)]);
  }
  row.eval_total_reward = median(totals);
  for (auto& d : devs) row.eval_deviation.push_back(median(d));
  return row;
}

TrainState initial_state(const TrainConfig& tc, const env::EnvConfig& ec, std::uint64_t seed) {
  TrainState st;
  st.online = QNetwork(network_shape(tc, ec));
  std::seed_seq init_seq{seed, std::uint64_t{0x6e6574}};
  std::mt19937_64 init_rng(init_seq);
  st.online.initialize(init_rng);
  st.target = st.online;
  st.adam = Adam(st.online.parameter_count(), tc.adam);
  std::seed_seq learner_seq{seed, std::uint64_t{0x6c72}};
  st.learner_rng.seed(learner_seq);
  return st;
}

TrainResult train(const env::EnvConfig& ec, const env::EnsembleTarget& target, const TrainConfig& tc,
                  std::uint64_t seed, const TrainHooks& hooks, const TrainState* resume) {
  tc.validate();
  TrainResult result;
  TrainState& st = result.state;
  st = resume ? *resume : initial_state(tc, ec, seed);
  QPREP_REQUIRE(st.online.shape() == network_shape(tc, ec), "train: resumed network does not match the configuration");

  std::vector<std::unique_ptr<env::Environment>> envs;
  for (int a = 0; a < tc.actors; ++a) envs.push_back(std::make_unique<env::Environment>(ec, target));
  env::Environment eval_env(ec, target);

  ReplayBuffer replay(tc.replay);
  const TdConfig td{tc.gamma, tc.n_step, tc.value_rescaling, tc.loss};
  const std::size_t min_replay = static_cast<std::size_t>(tc.min_replay > 0 ? tc.min_replay : tc.batch_size);
  const std::vector<int> positions = state_positions(ec.total_steps, tc.replay.sequence_length, tc.replay.burn_in);
  const double nominal = static_cast<double>(tc.batch_size) * tc.replay.sequence_length;

  auto emit = [&](CurveRow row) {
    row.episodes = st.episodes;
    row.env_steps = st.collected_steps;
    row.epsilon = tc.exploration.at(st.updates, tc.updates);
    if (hooks.on_row) hooks.on_row(row);
    result.curve.push_back(std::move(row));
  };

  double loss_acc = 0.0;
  int loss_count = 0;
  if (!resume) {
    CurveRow row = evaluate(st.online, eval_env, tc, seed, 0);
    row.loss = std::numeric_limits<double>::quiet_NaN();
    emit(std::move(row));
  }

  try {
    while (st.updates < tc.updates) {
      // acting: every actor uses the same parameter snapshot
      const double eps = tc.exploration.at(st.updates, tc.updates);
      std::vector<EpisodeResult> episodes(static_cast<std::size_t>(tc.actors));
      const std::int64_t first = st.episodes;
      parallel_for(episodes.size(), tc.threads, [&](std::size_t a) {
        std::mt19937_64 rng = episode_rng(seed, first + static_cast<std::int64_t>(a));
        episodes[a] = run_episode(st.online, *envs[a], eps, &rng, positions);
      });
      for (auto& e : episodes) {
        auto rec = std::make_shared<EpisodeRecord>();
        rec->id = st.episodes++;
        rec->actions = std::move(e.actions);
        rec->rewards = std::move(e.rewards);
        for (auto& seq : split_episode(rec, e.states, tc.replay.sequence_length, tc.replay.burn_in)) {
          replay.add(std::move(seq));
        }
        st.collected_steps += rec->length();
      }

      // learning, paced so trained transitions track replay_ratio * collected
      while (st.updates < tc.updates && replay.size() >= min_replay &&
             static_cast<double>(st.trained_steps) + nominal <= tc.replay_ratio * static_cast<double>(st.collected_steps)) {
        const SampledBatch batch = replay.sample(static_cast<std::size_t>(tc.batch_size), st.learner_rng);
        BatchLoss bl = sequence_loss(st.online, st.target, replay, batch, td);
        st.adam.step(st.online.params(), bl.grad);
        if (!st.online.params().allFinite()) throw NumericalError("numerical health: non-finite parameters after update");
        if (tc.replay.prioritized) {
          for (std::size_t b = 0; b < batch.indices.size(); ++b) replay.update_priority(batch.indices[b], bl.priorities[b]);
        }
        st.trained_steps += static_cast<std::int64_t>(std::llround(nominal));
        ++st.updates;
        loss_acc += bl.loss;
        ++loss_count;
        if (st.updates % tc.target_period == 0) st.target = st.online;
        if (st.updates % tc.eval_interval == 0 || st.updates == tc.updates) {
          CurveRow row = evaluate(st.online, eval_env, tc, seed, st.updates);
          row.loss = loss_count ? loss_acc / loss_count : std::numeric_limits<double>::quiet_NaN();
          loss_acc = 0.0;
          loss_count = 0;
          emit(std::move(row));
        }
        if (hooks.checkpoint && tc.checkpoint_interval > 0 && st.updates % tc.checkpoint_interval == 0) {
          hooks.checkpoint(st, "periodic");
        }
      }
    }
  } catch (const NumericalError&) {
    if (hooks.checkpoint) hooks.checkpoint(st, "diagnostic");
    throw;
  }

  result.final_eval = run_episode(st.online, eval_env, 0.0, nullptr);
  result.protocol = result.final_eval.actions;
  if (hooks.checkpoint) hooks.checkpoint(st, "final");
  return result;
}

}  // namespace qprep::rl
