#include "qprep/env/environment.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qprep/core/error.hpp"

namespace qprep::env {

std::string to_string(RewardNorm n) {
  switch (n) {
    case RewardNorm::Euclidean: return "euclidean";
    case RewardNorm::L1: return "l1";
    case RewardNorm::Max: return "max";
  }
  return "?";
}

RewardNorm parse_reward_norm(const std::string& s) {
  if (s == "euclidean") return RewardNorm::Euclidean;
  if (s == "l1") return RewardNorm::L1;
  if (s == "max") return RewardNorm::Max;
  throw InvalidArgument("unknown reward norm '" + s + "' (expected euclidean, l1 or max)");
}

void EnvConfig::validate() const {
  auto require = [](bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw InvalidArgument("env." + field + ": " + why);
  };
  require(std::isfinite(dt) && dt > 0.0, "dt", "must be positive and finite");
  require(total_steps >= 1, "total_steps", "must be at least 1");
  require(std::isfinite(reward_epsilon) && reward_epsilon > 0.0, "reward_epsilon", "must be positive");
  require(std::isfinite(variance_reward_weight) && variance_reward_weight >= 0.0, "variance_reward_weight",
          "must be non-negative");
  require(!observables.empty(), "observables", "must name at least one observable");
  require(target.beta >= 0.0 && std::isfinite(target.beta), "target.beta", "must be finite and non-negative");
  if (backend == BackendKind::IsingDense) {
    require(n_sites >= 2 && n_sites <= 24, "L", "must be in [2, 24] for ising-dense");
    require(target.kind == TargetKind::Gibbs, "target.kind", "ising-dense supports only gibbs targets");
    require(target.samples >= 2, "target.samples", "must be at least 2");
  } else {
    require(n_sites >= 4 && n_sites % 2 == 0, "L", "must be even and at least 4 for the XX backends");
    require(backend != BackendKind::XxDense || n_sites <= 14, "L", "must be at most 14 for xx-dense");
    require(target.kind == TargetKind::Gge, "target.kind", "XX backends support only gge targets");
    require(target.n_local >= 1 && target.n_local <= n_sites / 2, "target.n_local", "must be in [1, L/2]");
    require(target.deviation_max_n < n_sites / 2, "target.deviation_max_n", "must be below L/2");
  }
}

EnvConfig gibbs_env_defaults(int n_sites) {
  EnvConfig c;
  c.backend = BackendKind::IsingDense;
  c.n_sites = n_sites;
  c.dt = 0.1;
  c.total_steps = 240;
  c.observables = {"energy_density", "magnetization_density"};
  c.target.kind = TargetKind::Gibbs;
  c.target.beta = 0.2;
  return c;
}

EnvConfig gge_env_defaults(int n_sites) {
  EnvConfig c;
  c.backend = BackendKind::XxGauss;
  c.n_sites = n_sites;
  c.dt = 0.2;
  c.total_steps = 200;
  c.target.kind = TargetKind::Gge;
  c.target.beta = 0.4;
  c.target.epsilon_I = 0.05;
  c.target.n_local = 4;
  c.observables.clear();
  for (int n = 1; n <= c.target.n_local; ++n) c.observables.push_back("liom_plus_" + std::to_string(n));
  return c;
}

fermion::GgeSpec solve_target_gge(const EnvConfig& cfg) {
  const auto& t = cfg.target;
  const int dev = t.deviation_max_n >= 0 ? t.deviation_max_n : std::min(t.n_local, cfg.n_sites / 2 - 1);
  const fermion::GgeTarget targets = fermion::deformed_gibbs_targets(cfg.n_sites, t.beta, t.epsilon_I, cfg.physics.xx_J,
                                                                 cfg.physics.xx_h, dev);
  return fermion::solve_gge_multipliers(targets);
}

int default_particle_number(const fermion::GgeSpec& spec) {
  const double n = fermion::gge_correlation_matrix(spec).particle_number();
  int even = 2 * static_cast<int>(std::lround(0.5 * n));
  return std::clamp(even, 0, spec.n_sites - spec.n_sites % 2);
}

EnsembleTarget compute_target(const EnvConfig& cfg) {
  cfg.validate();
  EnsembleTarget out;
  out.names = cfg.observables;
  const auto n_obs = static_cast<Eigen::Index>(cfg.observables.size());
  out.values.resize(n_obs);
  out.variances = RealVector::Constant(n_obs, std::numeric_limits<double>::quiet_NaN());

  if (cfg.target.kind == TargetKind::Gibbs) {
    const pauli::SpinHamiltonian h = pauli::build_ising(cfg.n_sites, cfg.physics.ising);
    std::vector<pauli::NamedObservable> ops;
    for (const auto& name : cfg.observables) {
      int r = 0;
      if (name == "energy_density") {
        ops.push_back({name, h.scaled(1.0 / cfg.n_sites)});
      } else if (name == "magnetization_density") {
        ops.push_back({name, pauli::magnetization_density(cfg.n_sites)});
      } else if (name.size() > 1 && name[0] == 'z' && (r = std::atoi(name.c_str() + 1)) >= 1 && r <= cfg.n_sites) {
        ops.push_back({name, pauli::z_string_density(cfg.n_sites, r)});
      } else {
        throw InvalidArgument("env.observables: '" + name + "' has no Gibbs target");
      }
    }
    pauli::GibbsOptions opts;
    opts.method = cfg.n_sites <= cfg.target.exact_cap ? pauli::GibbsMethod::Exact : pauli::GibbsMethod::Stochastic;
    opts.exact_cap = std::max(cfg.target.exact_cap, 2);
    opts.samples = cfg.target.samples;
    opts.seed = cfg.target.seed;
    opts.propagator = cfg.physics.propagator;
    const pauli::GibbsTarget g = pauli::gibbs_expectations(h, cfg.target.beta, ops, opts);
    for (Eigen::Index i = 0; i < n_obs; ++i) {
      const auto& name = cfg.observables[static_cast<std::size_t>(i)];
      out.values[i] = g.expectations.at(name);
      out.variances[i] = g.variances.at(name);
    }
    std::ostringstream os;
    os << "gibbs beta=" << cfg.target.beta << (g.method == pauli::GibbsMethod::Exact ? " exact" : " stochastic");
    out.description = os.str();
    return out;
  }

  const fermion::GgeSpec spec = solve_target_gge(cfg);
  const fermion::CorrelationMatrix c = fermion::gge_correlation_matrix(spec);
  for (Eigen::Index i = 0; i < n_obs; ++i) {
    const auto& name = cfg.observables[static_cast<std::size_t>(i)];
    out.values[i] = measure_xx(c, name, cfg.physics.xx_J, cfg.physics.xx_h);
    if (name.rfind("gamma_", 0) != 0) out.variances[i] = measure_xx_variance(c, name, cfg.physics.xx_J, cfg.physics.xx_h);
  }
  out.gge = spec;
  std::ostringstream os;
  os << "gge beta=" << cfg.target.beta << " epsilon_I=" << cfg.target.epsilon_I;
  out.description = os.str();
  return out;
}

double deviation_norm(const RealVector& m, const RealVector& target, RewardNorm norm) {
  QPREP_REQUIRE(m.size() == target.size(), "reward: observable and target lengths differ");
  const RealVector d = m - target;
  switch (norm) {
    case RewardNorm::Euclidean: return d.norm();
    case RewardNorm::L1: return d.cwiseAbs().sum();
    case RewardNorm::Max: return d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
  }
  return d.norm();
}

double reward(const RealVector& m, const RealVector& target, double eps, RewardNorm norm, double variance_term,
              double variance_weight) {
  QPREP_REQUIRE(eps > 0.0, "reward: epsilon must be positive");
  QPREP_REQUIRE(variance_term >= 0.0 && variance_weight >= 0.0, "reward: variance term and weight must be non-negative");
  return 1.0 / (deviation_norm(m, target, norm) + variance_weight * variance_term + eps);
}

std::vector<std::string> action_set(const EnvConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.backend == BackendKind::IsingDense) {
    for (int k = 0; k < pauli::kIsingGeneratorCount; ++k) out.push_back(pauli::ising_generator_name(k));
  } else {
    for (int k = 0; k < fermion::kXxGeneratorCount; ++k) out.push_back(fermion::xx_generator_name(k));
  }
  return out;
}

Environment::Environment(EnvConfig cfg, std::optional<EnsembleTarget> target) : cfg_(std::move(cfg)) {
  cfg_.validate();
  if (target) {
    QPREP_REQUIRE(target->names == cfg_.observables, "Environment: supplied target does not match the observables");
    target_ = std::move(*target);
  } else {
    target_ = compute_target(cfg_);
  }
  if (cfg_.backend != BackendKind::IsingDense && cfg_.physics.n_particles < 0) {
    const fermion::GgeSpec spec = target_.gge ? *target_.gge : solve_target_gge(cfg_);
    cfg_.physics.n_particles = default_particle_number(spec);
  }
  backend_ = make_backend(cfg_.backend, cfg_.n_sites, cfg_.dt, cfg_.physics);
  for (const auto& name : cfg_.observables) reward_ids_.push_back(backend_->register_observable(name));
  reset();
}

Observation Environment::reset(std::uint64_t /*seed*/) {
  // the initial state is deterministic; the seed is accepted for interface symmetry
  backend_->reset();
  step_ = 0;
  started_ = true;
  obs_ = Observation{};
  obs_.history.assign(static_cast<std::size_t>(cfg_.total_steps), -1);
  return obs_;
}

RealVector Environment::measurements() const {
  RealVector m(static_cast<Eigen::Index>(reward_ids_.size()));
  for (std::size_t i = 0; i < reward_ids_.size(); ++i) m[static_cast<Eigen::Index>(i)] = backend_->measure(reward_ids_[i]);
  return m;
}

double Environment::measure(const std::string& name) {
  for (std::size_t i = 0; i < cfg_.observables.size(); ++i) {
    if (cfg_.observables[i] == name) return backend_->measure(reward_ids_[i]);
  }
  const int id = backend_->register_observable(name);
  return backend_->measure(id);
}

Transition Environment::step(int action) {
  if (!started_) throw InvalidArgument("Environment::step: call reset first");
  if (done()) throw InvalidArgument("Environment::step: episode is already done");
  QPREP_REQUIRE(action >= 0 && action < action_count(),
                "Environment::step: action index " + std::to_string(action) + " out of range");
  Transition tr;
  tr.observation = obs_;
  tr.action = action;
  backend_->apply_action(action);
  tr.measurements = measurements();
  double var_term = 0.0;
  if (cfg_.variance_reward_weight > 0.0) {
    for (int id : reward_ids_) var_term += backend_->measure_variance(id);
  }
  tr.reward = reward(tr.measurements, target_.values, cfg_.reward_epsilon, cfg_.reward_norm, var_term,
                     cfg_.variance_reward_weight);
  if (!std::isfinite(tr.reward)) throw NumericalError("Environment::step: non-finite reward");
  obs_.history[static_cast<std::size_t>(step_)] = action;
  obs_.prev_action = action;
  obs_.prev_reward = tr.reward;
  ++step_;
  obs_.step = step_;
  tr.next_observation = obs_;
  tr.step = step_;
  tr.done = done();
  return tr;
}

int Environment::free_relaxation(double duration,
                                 const std::function<void(PhysicsBackend&, double)>& visit) const {
  QPREP_REQUIRE(duration > 0.0 && std::isfinite(duration), "free_relaxation: duration must be positive");
  const long n = std::lround(duration / cfg_.dt);
  QPREP_REQUIRE(n >= 1, "free_relaxation: duration shorter than one time step");
  auto state = backend_->clone();
  for (long k = 1; k <= n; ++k) {
    state->free_step();
    if (visit) visit(*state, static_cast<double>(k) * cfg_.dt);
  }
  return static_cast<int>(n);
}

std::vector<double> replay_rewards(Environment& env, const std::vector<int>& actions) {
  env.reset();
  std::vector<double> out;
  out.reserve(actions.size());
  for (int a : actions) out.push_back(env.step(a).reward);
  return out;
}

}  // namespace qprep::env
