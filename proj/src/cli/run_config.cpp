#include "qprep/cli/run_config.hpp"

#include <sstream>

#include "qprep/env/backends.hpp"
#include "qprep/rl/checkpoint.hpp"

namespace qprep::cli {

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Gibbs: return "gibbs";
    case ExperimentKind::Gge: return "gge";
    case ExperimentKind::Oracle: return "oracle";
    case ExperimentKind::SweepShell: return "sweep-shell";
    case ExperimentKind::TggeDistance: return "tgge-distance";
    case ExperimentKind::Fit: return "fit";
  }
  return "?";
}

ExperimentKind parse_experiment(const std::string& s) {
  for (auto k : {ExperimentKind::Gibbs, ExperimentKind::Gge, ExperimentKind::Oracle, ExperimentKind::SweepShell,
                 ExperimentKind::TggeDistance, ExperimentKind::Fit}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidArgument("expected gibbs, gge, oracle, sweep-shell, tgge-distance or fit");
}

namespace {

const char* method_name(pauli::PropagatorMethod m) {
  switch (m) {
    case pauli::PropagatorMethod::Auto: return "auto";
    case pauli::PropagatorMethod::Krylov: return "krylov";
    case pauli::PropagatorMethod::Dense: return "dense";
  }
  return "?";
}

const char* sector_name(pauli::ShellSector s) {
  return s == pauli::ShellSector::Full ? "full" : "symmetric";
}

/// Reads an enum-valued key through `parse`, reporting failures at the key's line.
template <typename T, typename F>
void read_enum(IniDocument& doc, const std::string& section, const std::string& key, T& out, F parse) {
  const auto v = doc.take(section, key);
  if (!v) return;
  try {
    out = parse(*v);
  } catch (const InvalidArgument& e) {
    doc.fail(section, key, "'" + *v + "': " + e.what());
  }
}

template <typename T>
T pick(const std::string& s, std::initializer_list<std::pair<const char*, T>> options) {
  std::string names;
  for (const auto& [name, value] : options) {
    if (s == name) return value;
    names += names.empty() ? name : std::string(", ") + name;
  }
  throw InvalidArgument("expected one of " + names);
}

/// Where a validation field lives in the file.
std::pair<std::string, std::string> field_location(std::string field) {
  if (field.rfind("env.target.", 0) == 0) return {"target", field.substr(11)};
  if (field == "env.L") return {"env", "n_sites"};
  if (field.rfind("env.", 0) == 0) return {"env", field.substr(4)};
  if (field.rfind("train.", 0) == 0) {
    field = field.substr(6);
    if (field == "replay_capacity") return {"replay", "capacity"};
    if (field == "sequence_length" || field == "burn_in") return {"replay", field};
    if (field == "adam_betas") return {"train", "adam_beta1"};
    if (field == "epsilon") return {"train", "epsilon_start"};
    if (field == "widths") return {"train", "hidden1"};
    return {"train", field};
  }
  if (field.rfind("run.", 0) == 0) return {"run", field.substr(4)};
  if (field.rfind("eval.", 0) == 0) return {"eval", field.substr(5)};
  if (field.rfind("scaling.", 0) == 0) return {"scaling", field.substr(8)};
  if (field.rfind("tgge.", 0) == 0) return {"tgge", field.substr(5)};
  return {"", ""};
}

}  // namespace

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw InvalidArgument(field + ": " + why);
  };
  require(!seeds.empty(), "run.seeds", "must list at least one seed");
  require(!output.empty(), "run.output", "must not be empty");
  require(threads >= 1, "run.threads", "must be positive");
  if (experiment == ExperimentKind::Gibbs) {
    require(env.target.kind == env::TargetKind::Gibbs, "env.target.kind", "gibbs experiments need a gibbs target");
  }
  if (experiment == ExperimentKind::Gge) {
    require(env.target.kind == env::TargetKind::Gge, "env.target.kind", "gge experiments need a gge target");
  }
  env.validate();
  train.validate();
  for (int la : eval.las) require(la >= 1 && la <= env.n_sites, "eval.las", "block sizes must lie in [1, L]");
  require(eval.relaxation >= 0.0, "eval.relaxation", "must be non-negative");
  require(scaling.x == "auto" || scaling.x == "d" || scaling.x == "L", "scaling.x", "must be auto, d or L");
  require(scaling.shell_width > 0.0, "scaling.shell_width", "must be positive");
  for (double w : scaling.widths) require(w > 0.0, "scaling.widths", "must be positive");
  require(!scaling.fit_las.empty(), "scaling.fit_las", "must list at least one block size");
  require(tgge.n_local >= 0, "tgge.n_local", "must be non-negative");
  for (int l : tgge.sizes) require(l >= 4 && l % 2 == 0, "tgge.sizes", "must be even and at least 4");
  for (int l : tgge.sizes) require(tgge.n_local <= l / 2, "tgge.n_local", "must not exceed L/2");
  for (int la : tgge.las) require(la >= 1, "tgge.las", "must be positive");
}

RunConfig parse_run_config(IniDocument& doc) {
  RunConfig c;
  read_enum(doc, "run", "experiment", c.experiment, parse_experiment);
  int n_sites = c.experiment == ExperimentKind::Gge || c.experiment == ExperimentKind::TggeDistance ? 60 : 16;
  read(doc, "env", "n_sites", n_sites);
  c.env = c.experiment == ExperimentKind::Gge || c.experiment == ExperimentKind::TggeDistance
              ? env::gge_env_defaults(n_sites)
              : env::gibbs_env_defaults(n_sites);
  c.name = to_string(c.experiment);

  read(doc, "run", "name", c.name);
  read(doc, "run", "seeds", c.seeds);
  read(doc, "run", "output", c.output);
  read(doc, "run", "long_run", c.long_run);
  read(doc, "run", "threads", c.threads);

  auto& e = c.env;
  read_enum(doc, "env", "backend", e.backend, env::parse_backend);
  read(doc, "env", "dt", e.dt);
  read(doc, "env", "total_steps", e.total_steps);
  read(doc, "env", "reward_epsilon", e.reward_epsilon);
  read_enum(doc, "env", "reward_norm", e.reward_norm, env::parse_reward_norm);
  read(doc, "env", "observables", e.observables);
  read(doc, "env", "variance_reward_weight", e.variance_reward_weight);

  auto& p = e.physics;
  read(doc, "physics", "ising_J", p.ising.J);
  read(doc, "physics", "ising_h", p.ising.h);
  read(doc, "physics", "ising_g", p.ising.g);
  read(doc, "physics", "xx_J", p.xx_J);
  read(doc, "physics", "xx_h", p.xx_h);
  read(doc, "physics", "n_particles", p.n_particles);
  read(doc, "physics", "propagator_tol", p.propagator.tol);
  read(doc, "physics", "krylov_max_dim", p.propagator.max_krylov_dim);
  read_enum(doc, "physics", "propagator", p.propagator.method, [](const std::string& s) {
    return pick<pauli::PropagatorMethod>(
        s, {{"auto", pauli::PropagatorMethod::Auto}, {"krylov", pauli::PropagatorMethod::Krylov},
            {"dense", pauli::PropagatorMethod::Dense}});
  });
  read(doc, "physics", "dense_below", p.propagator.dense_below);

  auto& t = e.target;
  read_enum(doc, "target", "kind", t.kind, [](const std::string& s) {
    return pick<env::TargetKind>(s, {{"gibbs", env::TargetKind::Gibbs}, {"gge", env::TargetKind::Gge}});
  });
  read(doc, "target", "beta", t.beta);
  read(doc, "target", "exact_cap", t.exact_cap);
  read(doc, "target", "samples", t.samples);
  read(doc, "target", "seed", t.seed);
  read(doc, "target", "epsilon_I", t.epsilon_I);
  read(doc, "target", "deviation_max_n", t.deviation_max_n);
  read(doc, "target", "n_local", t.n_local);

  auto& r = c.train;
  read(doc, "train", "gamma", r.gamma);
  read(doc, "train", "batch_size", r.batch_size);
  read(doc, "train", "learning_rate", r.adam.learning_rate);
  read(doc, "train", "adam_beta1", r.adam.beta1);
  read(doc, "train", "adam_beta2", r.adam.beta2);
  read(doc, "train", "adam_epsilon", r.adam.epsilon);
  read(doc, "train", "clip_norm", r.adam.clip_norm);
  read(doc, "train", "replay_ratio", r.replay_ratio);
  read(doc, "train", "n_step", r.n_step);
  read(doc, "train", "target_period", r.target_period);
  read(doc, "train", "epsilon_start", r.exploration.start);
  read(doc, "train", "epsilon_end", r.exploration.end);
  read(doc, "train", "epsilon_fraction", r.exploration.fraction);
  read_enum(doc, "train", "dueling", r.dueling, [](const std::string& s) {
    return pick<rl::DuelingMode>(s, {{"sum", rl::DuelingMode::Sum}, {"mean", rl::DuelingMode::MeanSubtracted}});
  });
  read_enum(doc, "train", "loss", r.loss, [](const std::string& s) {
    return pick<rl::LossKind>(s, {{"mse", rl::LossKind::MeanSquared}, {"huber", rl::LossKind::Huber}});
  });
  read(doc, "train", "value_rescaling", r.value_rescaling);
  read(doc, "train", "hidden1", r.hidden1);
  read(doc, "train", "hidden2", r.hidden2);
  read(doc, "train", "lstm", r.lstm);
  read(doc, "train", "one_hot_history", r.one_hot_history);
  read(doc, "train", "updates", r.updates);
  read(doc, "train", "min_replay", r.min_replay);
  read(doc, "train", "actors", r.actors);
  read(doc, "train", "eval_interval", r.eval_interval);
  read(doc, "train", "eval_episodes", r.eval_episodes);
  read(doc, "train", "eval_epsilon", r.eval_epsilon);
  read(doc, "train", "checkpoint_interval", r.checkpoint_interval);

  read(doc, "replay", "capacity", r.replay.capacity);
  read(doc, "replay", "sequence_length", r.replay.sequence_length);
  read(doc, "replay", "burn_in", r.replay.burn_in);
  read(doc, "replay", "prioritized", r.replay.prioritized);
  read(doc, "replay", "priority_exponent", r.replay.priority_exponent);
  read(doc, "replay", "importance_exponent", r.replay.importance_exponent);
  read(doc, "replay", "priority_eta", r.replay.priority_eta);
  r.threads = c.threads;

  read(doc, "eval", "las", c.eval.las);
  read_enum(doc, "eval", "distance_norm", c.eval.norm, eval::parse_distance_norm);
  read(doc, "eval", "relaxation", c.eval.relaxation);
  read(doc, "eval", "report_observables", c.eval.report_observables);

  read(doc, "scaling", "x", c.scaling.x);
  read(doc, "scaling", "shell_width", c.scaling.shell_width);
  read_enum(doc, "scaling", "sector", c.scaling.sector, [](const std::string& s) {
    return pick<pauli::ShellSector>(
        s, {{"symmetric", pauli::ShellSector::ZeroMomentumEvenReflection}, {"full", pauli::ShellSector::Full}});
  });
  read(doc, "scaling", "widths", c.scaling.widths);
  read(doc, "scaling", "fit_las", c.scaling.fit_las);
  read(doc, "scaling", "inputs", c.scaling.inputs);
  read(doc, "scaling", "shell_cap", c.scaling.shell_cap);
  read(doc, "scaling", "energy_cap", c.scaling.energy_cap);

  read(doc, "tgge", "sizes", c.tgge.sizes);
  read(doc, "tgge", "n_local", c.tgge.n_local);
  read(doc, "tgge", "las", c.tgge.las);

  doc.reject_unused();
  try {
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& ex) {
    const std::string msg = ex.what();
    const auto colon = msg.find(": ");
    const auto [section, key] = field_location(msg.substr(0, colon));
    if (section.empty() || colon == std::string::npos) throw ConfigError(doc.source() + ": " + msg);
    doc.fail(section, key, msg.substr(colon + 2));
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  IniDocument doc = IniDocument::load(path);
  return parse_run_config(doc);
}

RunConfig parse_run_config_text(const std::string& text, const std::string& source) {
  IniDocument doc = IniDocument::parse(text, source);
  return parse_run_config(doc);
}

namespace {

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_same_v<T, double>) {
      out += format_double(v[i]);
    } else if constexpr (std::is_same_v<T, std::string>) {
      out += v[i];
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

const char* flag(bool b) { return b ? "true" : "false"; }

void write_model(std::ostream& os, const RunConfig& c) {
  const auto& e = c.env;
  const auto& p = e.physics;
  const auto& t = e.target;
  const auto& r = c.train;
  os << "[env]\n"
     << "backend = " << env::to_string(e.backend) << "\n"
     << "n_sites = " << e.n_sites << "\n"
     << "dt = " << format_double(e.dt) << "\n"
     << "total_steps = " << e.total_steps << "\n"
     << "reward_epsilon = " << format_double(e.reward_epsilon) << "\n"
     << "reward_norm = " << env::to_string(e.reward_norm) << "\n"
     << "observables = " << join(e.observables) << "\n"
     << "variance_reward_weight = " << format_double(e.variance_reward_weight) << "\n\n"
     << "[physics]\n"
     << "ising_J = " << format_double(p.ising.J) << "\n"
     << "ising_h = " << format_double(p.ising.h) << "\n"
     << "ising_g = " << format_double(p.ising.g) << "\n"
     << "xx_J = " << format_double(p.xx_J) << "\n"
     << "xx_h = " << format_double(p.xx_h) << "\n"
     << "n_particles = " << p.n_particles << "\n"
     << "propagator = " << method_name(p.propagator.method) << "\n"
     << "propagator_tol = " << format_double(p.propagator.tol) << "\n"
     << "krylov_max_dim = " << p.propagator.max_krylov_dim << "\n"
     << "dense_below = " << p.propagator.dense_below << "\n\n"
     << "[target]\n"
     << "kind = " << (t.kind == env::TargetKind::Gibbs ? "gibbs" : "gge") << "\n"
     << "beta = " << format_double(t.beta) << "\n"
     << "exact_cap = " << t.exact_cap << "\n"
     << "samples = " << t.samples << "\n"
     << "seed = " << t.seed << "\n"
     << "epsilon_I = " << format_double(t.epsilon_I) << "\n"
     << "deviation_max_n = " << t.deviation_max_n << "\n"
     << "n_local = " << t.n_local << "\n\n"
     << "[train]\n"
     << "gamma = " << format_double(r.gamma) << "\n"
     << "batch_size = " << r.batch_size << "\n"
     << "learning_rate = " << format_double(r.adam.learning_rate) << "\n"
     << "adam_beta1 = " << format_double(r.adam.beta1) << "\n"
     << "adam_beta2 = " << format_double(r.adam.beta2) << "\n"
     << "adam_epsilon = " << format_double(r.adam.epsilon) << "\n"
     << "clip_norm = " << format_double(r.adam.clip_norm) << "\n"
     << "replay_ratio = " << format_double(r.replay_ratio) << "\n"
     << "n_step = " << r.n_step << "\n"
     << "target_period = " << r.target_period << "\n"
     << "epsilon_start = " << format_double(r.exploration.start) << "\n"
     << "epsilon_end = " << format_double(r.exploration.end) << "\n"
     << "epsilon_fraction = " << format_double(r.exploration.fraction) << "\n"
     << "dueling = " << (r.dueling == rl::DuelingMode::Sum ? "sum" : "mean") << "\n"
     << "loss = " << (r.loss == rl::LossKind::MeanSquared ? "mse" : "huber") << "\n"
     << "value_rescaling = " << flag(r.value_rescaling) << "\n"
     << "hidden1 = " << r.hidden1 << "\n"
     << "hidden2 = " << r.hidden2 << "\n"
     << "lstm = " << r.lstm << "\n"
     << "one_hot_history = " << flag(r.one_hot_history) << "\n"
     << "updates = " << r.updates << "\n"
     << "min_replay = " << r.min_replay << "\n"
     << "actors = " << r.actors << "\n"
     << "eval_interval = " << r.eval_interval << "\n"
     << "eval_episodes = " << r.eval_episodes << "\n"
     << "eval_epsilon = " << format_double(r.eval_epsilon) << "\n"
     << "checkpoint_interval = " << r.checkpoint_interval << "\n\n"
     << "[replay]\n"
     << "capacity = " << r.replay.capacity << "\n"
     << "sequence_length = " << r.replay.sequence_length << "\n"
     << "burn_in = " << r.replay.burn_in << "\n"
     << "prioritized = " << flag(r.replay.prioritized) << "\n"
     << "priority_exponent = " << format_double(r.replay.priority_exponent) << "\n"
     << "importance_exponent = " << format_double(r.replay.importance_exponent) << "\n"
     << "priority_eta = " << format_double(r.replay.priority_eta) << "\n";
}

}  // namespace

std::string model_text(const RunConfig& c) {
  std::ostringstream os;
  write_model(os, c);
  return os.str();
}

std::string to_ini(const RunConfig& c) {
  std::ostringstream os;
  os << "[run]\n"
     << "experiment = " << to_string(c.experiment) << "\n"
     << "name = " << c.name << "\n"
     << "seeds = " << join(c.seeds) << "\n"
     << "output = " << c.output << "\n"
     << "long_run = " << flag(c.long_run) << "\n"
     << "threads = " << c.threads << "\n\n";
  write_model(os, c);
  os << "\n[eval]\n"
     << "las = " << join(c.eval.las) << "\n"
     << "distance_norm = " << eval::to_string(c.eval.norm) << "\n"
     << "relaxation = " << format_double(c.eval.relaxation) << "\n"
     << "report_observables = " << join(c.eval.report_observables) << "\n\n"
     << "[scaling]\n"
     << "x = " << c.scaling.x << "\n"
     << "shell_width = " << format_double(c.scaling.shell_width) << "\n"
     << "sector = " << sector_name(c.scaling.sector) << "\n"
     << "widths = " << join(c.scaling.widths) << "\n"
     << "fit_las = " << join(c.scaling.fit_las) << "\n"
     << "inputs = " << join(c.scaling.inputs) << "\n"
     << "shell_cap = " << c.scaling.shell_cap << "\n"
     << "energy_cap = " << c.scaling.energy_cap << "\n\n"
     << "[tgge]\n"
     << "sizes = " << join(c.tgge.sizes) << "\n"
     << "n_local = " << c.tgge.n_local << "\n"
     << "las = " << join(c.tgge.las) << "\n";
  return os.str();
}

std::uint64_t config_hash(const RunConfig& c) { return rl::fnv1a(model_text(c)); }

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qprep::cli
