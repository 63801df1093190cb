#include "qprep/cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "qprep/cli/csv.hpp"
#include "qprep/cli/oracle_suite.hpp"
#include "qprep/cli/run_config.hpp"
#include "qprep/core/error.hpp"
#include "qprep/eval/report.hpp"
#include "qprep/eval/scaling.hpp"
#include "qprep/pauli/shell.hpp"
#include "qprep/rl/checkpoint.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace qprep::cli {

namespace {

/// A required file or directory is absent (exit code 2).
class MissingInput : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct Options {
  std::string config;
  std::vector<std::uint64_t> seeds;
  int threads = 0;
  std::string output;
  bool dry_run = false;
  bool resume = false;
  bool long_run = false;
  std::vector<std::string> inputs;
  std::vector<std::string> only;
  bool list = false;
  std::string json_path;
};

struct Context {
  RunConfig cfg;
  fs::path root;
  std::string hash;
};

Context load_context(const Options& o) {
  if (!fs::exists(o.config)) throw MissingInput(o.config + ": config file not found");
  Context ctx;
  ctx.cfg = load_run_config(o.config);
  RunConfig& c = ctx.cfg;
  if (!o.seeds.empty()) c.seeds = o.seeds;
  if (o.threads > 0) {
    c.threads = o.threads;
    c.train.threads = o.threads;
  }
  if (!o.output.empty()) {
    ctx.root = o.output;
  } else if (const char* env = std::getenv("QPREP_OUTPUT_ROOT"); env && *env) {
    ctx.root = env;
  } else {
    ctx.root = c.output;
  }
  ctx.hash = hash_hex(config_hash(c));
  return ctx;
}

fs::path experiment_dir(const Context& ctx) { return ctx.root / ctx.cfg.name; }

fs::path seed_dir(const Context& ctx, std::uint64_t seed) {
  return experiment_dir(ctx) / ("seed_" + std::to_string(seed));
}

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path probe = dir / ".write_probe";
  std::ofstream f(probe);
  if (ec || !f) throw ConfigError(dir.string() + ": output directory is not writable");
  f.close();
  fs::remove(probe, ec);
}

void require_kind(const RunConfig& c, std::initializer_list<ExperimentKind> kinds, const std::string& command) {
  for (auto k : kinds) {
    if (c.experiment == k) return;
  }
  std::string names;
  for (auto k : kinds) names += (names.empty() ? "" : " or ") + to_string(k);
  throw ConfigError("[run] experiment: '" + command + "' needs experiment " + names + ", config has " +
                    to_string(c.experiment));
}

json number(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

json target_json(const env::EnsembleTarget& t) {
  json j = json::object();
  for (std::size_t i = 0; i < t.names.size(); ++i) j[t.names[i]] = number(t.values[static_cast<Eigen::Index>(i)]);
  return j;
}

// ---------------------------------------------------------------- train

void write_manifest(const fs::path& dir, const Context& ctx, std::uint64_t seed, const std::string& status,
                    const env::EnsembleTarget& target, const rl::TrainState* st, const rl::TrainResult* res) {
  const RunConfig& c = ctx.cfg;
  json m;
  m["schema"] = "manifest";
  m["version"] = 1;
  m["experiment"] = to_string(c.experiment);
  m["name"] = c.name;
  m["seed"] = seed;
  m["config_hash"] = ctx.hash;
  m["status"] = status;
  m["n_sites"] = c.env.n_sites;
  m["total_steps"] = c.env.total_steps;
  m["dt"] = c.env.dt;
  m["actions"] = env::action_set(c.env);
  m["observables"] = c.env.observables;
  m["target"] = target_json(target);
  if (st) {
    m["updates"] = st->updates;
    m["episodes"] = st->episodes;
    m["env_steps"] = st->collected_steps;
  }
  if (res) {
    m["final_total_reward"] = number(res->final_eval.total_reward);
    json dev = json::object();
    for (std::size_t i = 0; i < target.names.size(); ++i) {
      dev[target.names[i]] = number(res->final_eval.final_deviation[static_cast<Eigen::Index>(i)]);
    }
    m["final_deviation"] = dev;
  }
  m["artifacts"] = {"config.ini", "curves.csv", "protocol.txt", "checkpoints/latest.bin", "checkpoints/final.bin"};
  write_text_file(dir / "manifest.json", m.dump(2) + "\n");
}

/// Curve rows already on disk with update <= `through`, header included.
std::string curve_prefix(const fs::path& path, std::int64_t through, const std::string& header) {
  std::string out = header;
  if (!fs::exists(path)) return out;
  std::istringstream in(read_text_file(path));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (std::stoll(line.substr(0, line.find(','))) <= through) out += line + "\n";
  }
  return out;
}

void print_plan(const Context& ctx, std::ostream& out) {
  const RunConfig& c = ctx.cfg;
  out << "experiment " << to_string(c.experiment) << "  config_hash " << ctx.hash << "\n";
  out << "L=" << c.env.n_sites << " backend=" << env::to_string(c.env.backend) << " dt=" << format_double(c.env.dt)
      << " steps=" << c.env.total_steps << " T=" << format_double(c.env.total_time()) << "\n";
  out << "observables:";
  for (const auto& o : c.env.observables) out << " " << o;
  out << "\nactions:\n";
  const auto actions = env::action_set(c.env);
  for (std::size_t i = 0; i < actions.size(); ++i) out << "  " << i << "  " << actions[i] << "\n";
  for (auto s : c.seeds) out << "run directory " << seed_dir(ctx, s).string() << "\n";
}

int cmd_train(const Options& o, std::ostream& out) {
  Context ctx = load_context(o);
  const RunConfig& c = ctx.cfg;
  require_kind(c, {ExperimentKind::Gibbs, ExperimentKind::Gge}, "train");
  if (o.dry_run) {
    print_plan(ctx, out);
    return kExitOk;
  }
  if (c.long_run && !o.long_run) {
    throw ConfigError("[run] long_run: this is a full-scale configuration; pass --long-run to train it");
  }
  const env::EnsembleTarget target = env::compute_target(c.env);
  const std::vector<std::string> obs = target.names;
  for (std::uint64_t seed : c.seeds) {
    const fs::path dir = seed_dir(ctx, seed);
    ensure_writable(dir);
    const fs::path curves = dir / "curves.csv";
    const fs::path ckpt = dir / "checkpoints";
    std::optional<rl::TrainState> resume;
    if (o.resume) {
      const fs::path latest = ckpt / "latest.bin";
      if (!fs::exists(latest)) throw MissingInput(latest.string() + ": no checkpoint to resume from");
      rl::LoadedCheckpoint lc = rl::load_checkpoint(latest.string(), c.train.adam);
      if (hash_hex(lc.config_hash) != ctx.hash) {
        throw ConfigError(latest.string() + ": checkpoint config hash " + hash_hex(lc.config_hash) +
                          " does not match this config (" + ctx.hash + ")");
      }
      resume = std::move(lc.state);
    } else if (fs::exists(curves)) {
      throw ConfigError(dir.string() + ": run directory already holds results; use --resume or another --output");
    }
    fs::create_directories(ckpt);
    write_text_file(dir / "config.ini", to_ini(c));
    write_manifest(dir, ctx, seed, "running", target, resume ? &*resume : nullptr, nullptr);

    std::string text = curve_prefix(curves, resume ? resume->updates : -1, curves_header(obs, ctx.hash));
    write_text_file(curves, text);
    std::ofstream live(curves, std::ios::app);

    rl::TrainHooks hooks;
    hooks.on_row = [&](const rl::CurveRow& r) {
      const std::string line = curves_row(r);
      text += line;
      live << line << std::flush;
      out << "seed " << seed << " update " << r.update << " reward " << format_double(r.eval_total_reward) << "\n";
    };
    hooks.checkpoint = [&](const rl::TrainState& st, const std::string& tag) {
      const std::uint64_t h = config_hash(c);
      if (tag == "diagnostic") {
        rl::save_checkpoint((ckpt / "diagnostic.bin").string(), st, h);
        return;
      }
      rl::save_checkpoint((ckpt / "latest.bin").string(), st, h);
      if (tag == "final") rl::save_checkpoint((ckpt / "final.bin").string(), st, h);
    };
    rl::TrainResult res;
    try {
      res = rl::train(c.env, target, c.train, seed, hooks, resume ? &*resume : nullptr);
    } catch (const NumericalError&) {
      live.close();
      write_manifest(dir, ctx, seed, "numerical-abort", target, nullptr, nullptr);
      throw;
    }
    live.close();
    write_text_file(curves, text);
    write_text_file(dir / "protocol.txt", protocol_text(res.protocol, env::action_set(c.env), ctx.hash));
    write_manifest(dir, ctx, seed, "complete", target, &res.state, &res);
    out << "seed " << seed << " done: " << dir.string() << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- eval

/// Compares the replayed metrics with the last curves.csv row. Returns a
/// description; throws when an exact comparison is expected and fails.
std::string check_final_row(const fs::path& curves, const rl::TrainState& st, double total, const RealVector& dev,
                            const env::EnsembleTarget& target, const RunConfig& c) {
  if (c.train.eval_epsilon != 0.0) return "skipped (eval_epsilon > 0: curve rows are sampled medians)";
  const CsvTable t = read_csv(curves, "curves", kCurvesVersion);
  if (t.rows.empty()) throw MissingInput(curves.string() + ": no rows");
  const std::size_t last = t.rows.size() - 1;
  if (static_cast<std::int64_t>(t.number(last, "update")) != st.updates) {
    throw Error(curves.string() + ": last row is at update " + t.text(last, "update") + ", checkpoint at " +
                std::to_string(st.updates));
  }
  auto same = [&](const std::string& col, double v) {
    if (t.text(last, col) != format_double(v)) {
      throw Error(curves.string() + ": replayed " + col + " = " + format_double(v) + " differs from the recorded " +
                  t.text(last, col));
    }
  };
  same("eval_total_reward", total);
  for (std::size_t k = 0; k < target.names.size(); ++k) same("deviation_" + target.names[k], dev[static_cast<Eigen::Index>(k)]);
  return "exact";
}

int cmd_eval(const Options& o, std::ostream& out) {
  Context ctx = load_context(o);
  const RunConfig& c = ctx.cfg;
  require_kind(c, {ExperimentKind::Gibbs, ExperimentKind::Gge}, "eval");
  for (auto s : c.seeds) {
    for (const char* f : {"protocol.txt", "curves.csv", "checkpoints/final.bin"}) {
      if (!fs::exists(seed_dir(ctx, s) / f)) throw MissingInput((seed_dir(ctx, s) / f).string() + ": not found");
    }
  }
  if (o.dry_run) {
    for (auto s : c.seeds) out << "would evaluate " << seed_dir(ctx, s).string() << "\n";
    return kExitOk;
  }
  const env::EnsembleTarget target = env::compute_target(c.env);
  const eval::BlockReference ref = eval::target_reference(c.env, target, c.eval.las);
  const double window = c.eval.relaxation > 0.0 ? c.eval.relaxation : c.env.total_time();
  const std::vector<std::string> report_obs =
      c.eval.report_observables.empty() ? eval::default_report_observables(c.env) : c.eval.report_observables;
  std::vector<eval::DistanceSeries> all;

  for (std::uint64_t seed : c.seeds) {
    const fs::path dir = seed_dir(ctx, seed);
    const rl::LoadedCheckpoint lc = rl::load_checkpoint((dir / "checkpoints/final.bin").string(), c.train.adam);
    if (hash_hex(lc.config_hash) != ctx.hash) {
      throw ConfigError((dir / "checkpoints/final.bin").string() + ": checkpoint config hash " +
                        hash_hex(lc.config_hash) + " does not match this config (" + ctx.hash + ")");
    }
    std::string proto_hash;
    const std::vector<int> protocol =
        parse_protocol(read_text_file(dir / "protocol.txt"), (dir / "protocol.txt").string(), &proto_hash);
    if (proto_hash != ctx.hash) {
      throw ConfigError((dir / "protocol.txt").string() + ": config hash " + proto_hash + " does not match " + ctx.hash);
    }

    env::Environment env(c.env, target);
    const rl::EpisodeResult greedy = rl::run_episode(lc.state.online, env, 0.0, nullptr);
    if (greedy.actions != protocol) {
      throw Error((dir / "protocol.txt").string() + ": the checkpoint's greedy policy does not reproduce the protocol");
    }
    const std::vector<double> rewards = env::replay_rewards(env, protocol);
    double total = 0.0;
    for (double r : rewards) total += r;
    const RealVector dev = (env.measurements() - target.values).cwiseAbs();
    const std::string reproduced = check_final_row(dir / "curves.csv", lc.state, total, dev, target, c);

    std::vector<eval::DistanceSeries> series = eval::relaxation_distances(env, window, ref, seed, c.eval.norm);
    std::vector<eval::DistanceRow> rows;
    for (auto& r : eval::distance_table(series)) {
      if (r.seed != "all") rows.push_back(r);
    }
    const eval::TrajectoryReport rep = eval::trajectory_report(c.env, target, protocol, report_obs, window);

    const fs::path ed = dir / "eval";
    write_text_file(ed / "trajectory.csv", trajectory_csv(rep, ctx.hash));
    write_text_file(ed / "distance_series.csv", distance_series_csv(series, ctx.hash));
    write_text_file(ed / "distance.csv", distance_csv(rows, ctx.hash));
    json s;
    s["schema"] = "eval-summary";
    s["version"] = 1;
    s["config_hash"] = ctx.hash;
    s["seed"] = seed;
    s["total_reward"] = number(total);
    json d = json::object();
    for (std::size_t k = 0; k < target.names.size(); ++k) d[target.names[k]] = number(dev[static_cast<Eigen::Index>(k)]);
    s["final_deviation"] = d;
    s["curves_final_row"] = reproduced;
    s["relaxation_window"] = window;
    s["distance_norm"] = eval::to_string(c.eval.norm);
    write_text_file(ed / "summary.json", s.dump(2) + "\n");
    out << "seed " << seed << ": total reward " << format_double(total) << ", final row " << reproduced;
    for (const auto& r : rows) out << ", D(LA=" << r.la << ")=" << format_double(r.dbar);
    out << "\n";
    all.insert(all.end(), series.begin(), series.end());
  }
  write_text_file(experiment_dir(ctx) / "distance.csv", distance_csv(eval::distance_table(all), ctx.hash));
  out << "wrote " << (experiment_dir(ctx) / "distance.csv").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- fit / sweep

struct TablePoint {
  int n_sites;
  double dbar;
  double sigma;
};

/// "all" rows of the distance tables, per block size.
std::map<int, std::vector<TablePoint>> load_distance_tables(const Context& ctx, const Options& o) {
  std::vector<std::string> inputs = o.inputs.empty() ? ctx.cfg.scaling.inputs : o.inputs;
  if (inputs.empty()) throw MissingInput("no distance tables given ([scaling] inputs or --input)");
  std::map<int, std::vector<TablePoint>> out;
  for (const auto& in : inputs) {
    fs::path p = in;
    if (p.is_relative() && !fs::exists(p)) p = ctx.root / p;
    if (!fs::exists(p)) throw MissingInput(in + ": distance table not found");
    for (const auto& r : parse_distance_rows(read_csv(p, "distance", kDistanceVersion))) {
      if (r.seed != "all") continue;
      for (const auto& q : out[r.la]) {
        if (q.n_sites == r.n_sites) {
          throw InvalidArgument(p.string() + ": L=" + std::to_string(r.n_sites) + ", LA=" + std::to_string(r.la) +
                                " appears in more than one input");
        }
      }
      out[r.la].push_back({r.n_sites, r.dbar, r.sigma});
    }
  }
  return out;
}

std::string fit_axis(const RunConfig& c) {
  if (c.scaling.x != "auto") return c.scaling.x;
  return c.env.target.kind == env::TargetKind::Gibbs ? "d" : "L";
}

int cmd_fit(const Options& o, std::ostream& out) {
  Context ctx = load_context(o);
  const RunConfig& c = ctx.cfg;
  const auto tables = load_distance_tables(ctx, o);
  const std::string axis = fit_axis(c);
  if (o.dry_run) {
    out << "fit D-bar against " << axis << " for LA in";
    for (int la : c.scaling.fit_las) out << " " << la;
    out << "\n";
    return kExitOk;
  }
  std::map<int, double> abscissa;
  auto x_of = [&](int n) {
    if (axis == "L") return static_cast<double>(n);
    if (!abscissa.count(n)) {
      const double e = eval::ising_thermal_energy(n, c.env.target.beta, c.env.physics.ising, c.scaling.energy_cap);
      abscissa[n] = static_cast<double>(pauli::shell_dimension(pauli::build_ising(n, c.env.physics.ising), e,
                                                               c.scaling.shell_width, c.scaling.sector,
                                                               c.scaling.shell_cap));
    }
    return abscissa[n];
  };
  std::vector<FitRow> fits;
  std::vector<FitPoint> points;
  for (int la : c.scaling.fit_las) {
    if (!tables.count(la)) throw MissingInput("no distance rows for LA=" + std::to_string(la));
    std::vector<TablePoint> pts = tables.at(la);
    std::vector<std::pair<double, TablePoint>> sorted;
    for (const auto& p : pts) sorted.emplace_back(x_of(p.n_sites), p);
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> xs, ys, sig;
    bool weighted = true;
    for (const auto& [x, p] : sorted) {
      const bool keep = (axis != "d" || x > 1.0) && (xs.empty() || x > xs.back());
      points.push_back({la, axis, p.n_sites, x, p.dbar, p.sigma, keep});
      if (!keep) continue;
      xs.push_back(x);
      ys.push_back(p.dbar);
      sig.push_back(p.sigma);
      weighted = weighted && std::isfinite(p.sigma) && p.sigma > 0.0;
    }
    if (xs.size() < 3) {
      throw InvalidArgument("LA=" + std::to_string(la) + ": " + std::to_string(xs.size()) +
                            " usable points, a fit needs three");
    }
    FitRow row{la, axis, eval::fit_power_law(xs, ys, weighted ? sig : std::vector<double>{})};
    out << "LA=" << la << ": D-bar ~ " << axis << "^-b, b = " << format_double(row.fit.b) << " +- "
        << format_double(row.fit.b_err) << " over " << xs.size() << " points\n";
    fits.push_back(row);
  }
  ensure_writable(experiment_dir(ctx));
  write_text_file(experiment_dir(ctx) / "fit.csv", fit_csv(fits, ctx.hash));
  write_text_file(experiment_dir(ctx) / "fit_points.csv", fit_points_csv(points, ctx.hash));
  out << "wrote " << (experiment_dir(ctx) / "fit.csv").string() << "\n";
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  Context ctx = load_context(o);
  const RunConfig& c = ctx.cfg;
  if (c.env.target.kind != env::TargetKind::Gibbs) {
    throw ConfigError("[target] kind: sweep-shell needs Ising Gibbs distance tables");
  }
  const auto tables = load_distance_tables(ctx, o);
  if (o.dry_run) {
    out << "sweep " << c.scaling.widths.size() << " shell widths over " << tables.size() << " block sizes\n";
    return kExitOk;
  }
  std::map<int, double> energy;
  std::vector<SweepBlock> blocks;
  for (int la : c.scaling.fit_las) {
    if (!tables.count(la)) throw MissingInput("no distance rows for LA=" + std::to_string(la));
    std::vector<eval::ShellPoint> pts;
    for (const auto& p : tables.at(la)) {
      if (!energy.count(p.n_sites)) {
        energy[p.n_sites] = eval::ising_thermal_energy(p.n_sites, c.env.target.beta, c.env.physics.ising, c.scaling.energy_cap);
      }
      pts.push_back({p.n_sites, p.dbar, std::isfinite(p.sigma) ? p.sigma : 0.0, energy[p.n_sites]});
    }
    SweepBlock blk{la, eval::shell_width_sweep(c.env.physics.ising, pts, c.scaling.widths, c.scaling.sector,
                                               c.scaling.shell_cap)};
    const auto [lo, hi] = eval::sweep_plateau(blk.rows, 0.1);
    out << "LA=" << la << ": b plateau over widths [" << format_double(lo) << ", " << format_double(hi) << "]\n";
    blocks.push_back(std::move(blk));
  }
  ensure_writable(experiment_dir(ctx));
  write_text_file(experiment_dir(ctx) / "sweep.csv", sweep_csv(blocks, ctx.hash));
  out << "wrote " << (experiment_dir(ctx) / "sweep.csv").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- tgge / oracle

int cmd_tgge(const Options& o, std::ostream& out) {
  Context ctx = load_context(o);
  const RunConfig& c = ctx.cfg;
  if (c.env.target.kind != env::TargetKind::Gge) throw ConfigError("[target] kind: tgge needs a gge target");
  if (o.dry_run) {
    for (int n : c.tgge.sizes) out << "would compare tGGE(n_local=" << c.tgge.n_local << ") with the GGE at L=" << n << "\n";
    return kExitOk;
  }
  std::vector<TggeTableRow> rows;
  for (int n : c.tgge.sizes) {
    env::EnvConfig ec = c.env;
    ec.n_sites = n;
    const fermion::GgeSpec spec = env::solve_target_gge(ec);
    std::vector<int> las;
    for (int la : c.tgge.las) {
      if (la <= n) las.push_back(la);
    }
    for (const auto& r : eval::tgge_vs_gge(spec, c.tgge.n_local, las, c.eval.norm)) {
      rows.push_back({n, c.tgge.n_local, r});
      out << "L=" << n << " LA=" << r.la << " D=" << format_double(r.distance) << "\n";
    }
  }
  ensure_writable(experiment_dir(ctx));
  write_text_file(experiment_dir(ctx) / "tgge.csv", tgge_csv(rows, ctx.hash));
  out << "wrote " << (experiment_dir(ctx) / "tgge.csv").string() << "\n";
  return kExitOk;
}

int cmd_oracle(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.list) {
    for (const auto& n : oracle_names()) out << n << "\n";
    return kExitOk;
  }
  for (const auto& n : o.only) {
    const auto names = oracle_names();
    if (std::find(names.begin(), names.end(), n) == names.end()) throw ConfigError("--only: unknown oracle '" + n + "'");
  }
  std::vector<OracleResult> results;
  for (const auto& n : o.only.empty() ? oracle_names() : o.only) {
    results.push_back(run_oracle(n));
    err << oracle_line(results.back()) << "\n";
  }
  const nlohmann::json j = oracle_json(results);
  if (!o.json_path.empty()) write_text_file(o.json_path, j.dump(2) + "\n");
  out << j.dump(2) << "\n";
  return j["pass"].get<bool>() ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qprep: state preparation by reinforcement learning"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config,-c", o.config, "Experiment configuration file")->required();
    cmd->add_option("--output,-o", o.output, "Output root (overrides QPREP_OUTPUT_ROOT and [run] output)");
    cmd->add_option("--seed", o.seeds, "Seed(s) to use instead of [run] seeds");
    cmd->add_option("--threads", o.threads, "Worker threads (1 is deterministic)")->check(CLI::PositiveNumber);
    cmd->add_flag("--dry-run", o.dry_run, "Validate and print the plan without computing");
  };
  CLI::App* train = app.add_subcommand("train", "Train an agent, one run directory per seed");
  common(train);
  train->add_flag("--resume", o.resume, "Continue from checkpoints/latest.bin");
  train->add_flag("--long-run", o.long_run, "Permit configurations marked long_run");
  CLI::App* ev = app.add_subcommand("eval", "Replay trained protocols and measure block distances");
  common(ev);
  CLI::App* fit = app.add_subcommand("fit", "Fit D-bar power laws to distance tables");
  common(fit);
  fit->add_option("--input", o.inputs, "Distance table (repeatable)");
  CLI::App* sweep = app.add_subcommand("sweep-shell", "Scan the energy-shell width used for d");
  common(sweep);
  sweep->add_option("--input", o.inputs, "Distance table (repeatable)");
  CLI::App* tgge = app.add_subcommand("tgge", "Distance between truncated and full GGE blocks");
  common(tgge);
  CLI::App* oracle = app.add_subcommand("oracle", "Run the cross-backend and finite-difference oracles");
  oracle->add_option("--only", o.only, "Run only the named oracle (repeatable)");
  oracle->add_flag("--list", o.list, "List the oracle names");
  oracle->add_option("--json", o.json_path, "Also write the report to this file");

  std::vector<std::string> argv_store{"qprep"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train) return cmd_train(o, out);
    if (*ev) return cmd_eval(o, out);
    if (*fit) return cmd_fit(o, out);
    if (*sweep) return cmd_sweep(o, out);
    if (*tgge) return cmd_tgge(o, out);
    if (*oracle) return cmd_oracle(o, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MissingInput& e) {
    err << "missing input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical abort: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace qprep::cli
