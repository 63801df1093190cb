#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "qprep/cli/commands.hpp"
#include "qprep/cli/csv.hpp"
#include "qprep/cli/run_config.hpp"
#include "qprep/core/error.hpp"
#include "qprep/rl/checkpoint.hpp"

using namespace qprep;
using namespace qprep::cli;
namespace fs = std::filesystem;

namespace {

const char* kTiny = R"([run]
experiment = gibbs
name = tiny
seeds = 1, 2
[env]
n_sites = 4
total_steps = 12
[train]
hidden1 = 8
hidden2 = 8
lstm = 8
batch_size = 4
n_step = 3
updates = 12
eval_interval = 4
target_period = 5
checkpoint_interval = 4
actors = 2
[replay]
sequence_length = 5
burn_in = 2
[eval]
las = 1, 2
)";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("qprep_cli_" + tag + "_" + std::to_string(std::random_device{}()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) { return read_text_file(p); }

std::string config_error(const std::string& text) {
  try {
    parse_run_config_text(text, "test.ini");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string distance_table_text(const std::vector<std::pair<int, double>>& points, int la) {
  std::vector<eval::DistanceRow> rows;
  for (auto [n, d] : points) rows.push_back({n, la, "all", d, 0.1 * d});
  return distance_csv(rows, "0000000000000000");
}

}  // namespace

TEST_CASE("shipped presets parse and round-trip") {
  int count = 0;
  for (const auto& e : fs::directory_iterator(QPREP_SOURCE_DIR "/configs")) {
    if (e.path().extension() != ".ini") continue;
    ++count;
    CAPTURE(e.path().string());
    const RunConfig c = load_run_config(e.path().string());
    const std::string text = to_ini(c);
    const RunConfig back = parse_run_config_text(text, "roundtrip");
    CHECK(to_ini(back) == text);
    CHECK(config_hash(back) == config_hash(c));
  }
  CHECK(count >= 8);
  const RunConfig full = load_run_config(QPREP_SOURCE_DIR "/configs/gibbs_full.ini");
  CHECK(full.env.n_sites == 16);
  CHECK(full.env.total_steps == 240);
  CHECK(full.env.total_time() == doctest::Approx(24.0));
  CHECK(full.env.target.beta == 0.2);
  CHECK(full.long_run);
  const RunConfig gge = load_run_config(QPREP_SOURCE_DIR "/configs/gge_L120.ini");
  CHECK(gge.env.total_time() == doctest::Approx(40.0));
  CHECK(gge.env.dt == 0.2);
  CHECK(gge.env.target.n_local == 4);
}

TEST_CASE("config diagnostics carry the line number") {
  CHECK(config_error("[run]\nexperiment = gibbs\n[env]\nn_sitez = 6\n").find("test.ini:4") != std::string::npos);
  CHECK(config_error("[run]\nexperiment = gibbs\n[env]\nn_sitez = 6\n").find("unknown key") != std::string::npos);
  const std::string bad = config_error("[run]\nexperiment = gibbs\n[env]\nn_sites = six\n");
  CHECK(bad.find("test.ini:4") != std::string::npos);
  CHECK(bad.find("n_sites") != std::string::npos);
  const std::string invalid = config_error("[run]\nexperiment = gibbs\n[env]\nn_sites = 1\n");
  CHECK(invalid.find("test.ini:4") != std::string::npos);
  CHECK(invalid.find("[env] n_sites") != std::string::npos);
  CHECK(config_error("[run]\nexperiment = gibbs\nexperiment = gge\n").find("test.ini:3") != std::string::npos);
  CHECK(config_error("experiment = gibbs\n").find("test.ini:1") != std::string::npos);
  CHECK(config_error("[run]\nexperiment = quantum\n").find("experiment") != std::string::npos);
  CHECK(config_error("[run]\nexperiment = gibbs\nseeds =\n").find("seeds") != std::string::npos);
  CHECK(config_error("[run]\nexperiment = gibbs\n[train]\nlearning_rate = -1\n").find("test.ini:4") !=
        std::string::npos);
  CHECK(config_error("[run]\nexperiment = gibbs\n[bogus]\nx = 1\n").find("bogus") != std::string::npos);
}

TEST_CASE("config hash covers the model, not the bookkeeping") {
  const RunConfig base = parse_run_config_text(kTiny);
  const std::string text = kTiny;
  auto with = [&](const std::string& from, const std::string& to) {
    std::string t = text;
    t.replace(t.find(from), from.size(), to);
    return config_hash(parse_run_config_text(t));
  };
  CHECK(with("seeds = 1, 2", "seeds = 3") == config_hash(base));
  CHECK(with("name = tiny", "name = other") == config_hash(base));
  CHECK(with("updates = 12", "updates = 13") != config_hash(base));
  CHECK(with("n_sites = 4", "n_sites = 6") != config_hash(base));
  CHECK(with("burn_in = 2", "burn_in = 1") != config_hash(base));
  CHECK(hash_hex(config_hash(base)).size() == 16);
  CHECK(hash_hex(0x1f) == "000000000000001f");
}

TEST_CASE("CSV schema checks") {
  const std::string good = "# qprep-csv schema=tgge version=1 config_hash=ab\nL,n_local,LA,distance\n60,4,1,1e-12\n";
  const CsvTable t = parse_csv(good, "tgge", kTggeVersion);
  CHECK(t.rows.size() == 1);
  CHECK(t.number(0, "distance") == 1e-12);
  CHECK(t.meta.at("config_hash") == "ab");
  CHECK_THROWS_AS(parse_csv(good, "fit", kFitVersion), InvalidArgument);
  CHECK_THROWS_AS(parse_csv(good, "tgge", 2), InvalidArgument);
  CHECK_THROWS_AS(parse_csv("L,LA\n1,2\n", "tgge", 1), InvalidArgument);
  CHECK_THROWS_AS(parse_csv("# qprep-csv schema=tgge version=1\nL,LA\n1\n", "tgge", 1), InvalidArgument);
  CHECK_THROWS_AS(t.number(0, "missing"), InvalidArgument);
  const CsvTable bad = parse_csv("# qprep-csv schema=tgge version=1\nL\nabc\n", "tgge", 1);
  CHECK_THROWS_AS(bad.number(0, "L"), InvalidArgument);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::pow(10.0, u(rng)) * (i % 2 ? -1.0 : 1.0);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(40.0) == "40");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::nan("")) == "nan");

  const std::vector<int> actions{0, 5, 2, 2, 14};
  std::string hash;
  CHECK(parse_protocol(protocol_text(actions, {"a", "b"}, "00ff00ff00ff00ff"), "p", &hash) == actions);
  CHECK(hash == "00ff00ff00ff00ff");
  CHECK_THROWS_AS(parse_protocol("# qprep-protocol version=1\n3\nx\n", "p"), InvalidArgument);
  CHECK_THROWS_AS(parse_protocol("3\n", "p"), InvalidArgument);

  std::vector<eval::DistanceRow> rows{{8, 1, "1", 0.25, 0.01}, {8, 1, "all", 0.25, std::nan("")}};
  const auto back = parse_distance_rows(parse_csv(distance_csv(rows, "h"), "distance", kDistanceVersion));
  REQUIRE(back.size() == 2);
  CHECK(back[1].seed == "all");
  CHECK(std::isnan(back[1].sigma));
  CHECK(back[0].dbar == 0.25);
}

TEST_CASE("train and eval through the command line") {
  TempDir dir("train");
  const fs::path cfg = dir.write("tiny.ini", kTiny);
  const std::string a = (dir.path / "a").string(), b = (dir.path / "b").string();

  const Run dry = invoke({"train", "--config", cfg.string(), "--dry-run", "--output", a});
  CHECK(dry.code == kExitOk);
  CHECK(dry.out.find("H_Ising") != std::string::npos);
  CHECK(!fs::exists(dir.path / "a"));

  REQUIRE(invoke({"train", "--config", cfg.string(), "--output", a}).code == kExitOk);
  REQUIRE(invoke({"train", "--config", cfg.string(), "--output", b, "--threads", "2"}).code == kExitOk);
  const fs::path s1 = dir.path / "a/tiny/seed_1";
  for (const char* f : {"manifest.json", "config.ini", "curves.csv", "protocol.txt", "checkpoints/latest.bin",
                        "checkpoints/final.bin"}) {
    CHECK(fs::exists(s1 / f));
  }
  SUBCASE("byte-identical and thread-independent artifacts") {
    for (const char* f : {"curves.csv", "protocol.txt", "manifest.json"}) {
      CHECK(slurp(s1 / f) == slurp(dir.path / "b/tiny/seed_1" / f));
    }
    const CsvTable curves = read_csv(s1 / "curves.csv", "curves", kCurvesVersion);
    CHECK(curves.rows.size() == 4);
    CHECK(curves.meta.at("config_hash") == hash_hex(config_hash(load_run_config(cfg.string()))));
    CHECK(slurp(s1 / "config.ini") == to_ini(load_run_config(cfg.string())));
  }
  SUBCASE("existing results are not overwritten") {
    CHECK(invoke({"train", "--config", cfg.string(), "--output", a}).code == kExitConfig);
  }
  SUBCASE("output root from the environment") {
    const std::string c = (dir.path / "env_root").string();
    setenv("QPREP_OUTPUT_ROOT", c.c_str(), 1);
    const Run r = invoke({"train", "--config", cfg.string(), "--seed", "3"});
    unsetenv("QPREP_OUTPUT_ROOT");
    CHECK(r.code == kExitOk);
    CHECK(fs::exists(dir.path / "env_root/tiny/seed_3/curves.csv"));
  }
  SUBCASE("eval replays the protocol and writes its tables") {
    const Run r = invoke({"eval", "--config", cfg.string(), "--output", a});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("final row exact") != std::string::npos);
    const CsvTable d = read_csv(dir.path / "a/tiny/distance.csv", "distance", kDistanceVersion);
    CHECK(d.rows.size() == 6);
    const CsvTable traj = read_csv(s1 / "eval/trajectory.csv", "trajectory", kTrajectoryVersion);
    // t=0, 12 protocol steps, then round(T/dt) = 12 relaxation steps
    CHECK(traj.rows.size() == 25);
    CHECK(traj.number(12, "t") == doctest::Approx(1.2));
    const CsvTable series = read_csv(s1 / "eval/distance_series.csv", "distance-series", kDistanceSeriesVersion);
    CHECK(series.rows.size() == 24);
    CHECK(fs::exists(s1 / "eval/summary.json"));
  }
  SUBCASE("eval refuses a checkpoint from another configuration") {
    std::string other = kTiny;
    other.replace(other.find("target_period = 5"), 17, "target_period = 6");
    const fs::path cfg2 = dir.write("other.ini", other);
    const Run r = invoke({"eval", "--config", cfg2.string(), "--output", a});
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("config hash") != std::string::npos);
  }
  SUBCASE("eval without a run directory") {
    CHECK(invoke({"eval", "--config", cfg.string(), "--output", (dir.path / "none").string()}).code == kExitConfig);
  }
  SUBCASE("resume from an intermediate checkpoint") {
    const RunConfig c = load_run_config(cfg.string());
    const env::EnsembleTarget target = env::compute_target(c.env);
    rl::TrainHooks hooks;
    struct Stop {};
    hooks.checkpoint = [&](const rl::TrainState& st, const std::string& tag) {
      if (tag == "periodic" && st.updates == 8) {
        rl::save_checkpoint((s1 / "checkpoints/latest.bin").string(), st, config_hash(c));
        throw Stop{};
      }
    };
    CHECK_THROWS_AS(rl::train(c.env, target, c.train, 1, hooks), Stop);
    const Run r = invoke({"train", "--config", cfg.string(), "--output", a, "--seed", "1", "--resume"});
    REQUIRE(r.code == kExitOk);
    const CsvTable curves = read_csv(s1 / "curves.csv", "curves", kCurvesVersion);
    REQUIRE(curves.rows.size() == 4);
    CHECK(curves.number(2, "update") == 8);
    CHECK(curves.number(3, "update") == 12);
    CHECK(curves.number(3, "episodes") > curves.number(2, "episodes"));
    CHECK(slurp(s1 / "manifest.json").find("\"complete\"") != std::string::npos);
  }
  SUBCASE("resume refuses a checkpoint from another configuration") {
    std::string other = kTiny;
    other.replace(other.find("target_period = 5"), 17, "target_period = 6");
    const fs::path cfg2 = dir.write("other.ini", other);
    CHECK(invoke({"train", "--config", cfg2.string(), "--output", a, "--resume"}).code == kExitConfig);
  }
}

TEST_CASE("command-line errors map to exit codes") {
  TempDir dir("errors");
  CHECK(invoke({}).code == kExitConfig);
  CHECK(invoke({"frobnicate"}).code == kExitConfig);
  CHECK(invoke({"train"}).code == kExitConfig);
  CHECK(invoke({"train", "--config", (dir.path / "absent.ini").string()}).code == kExitConfig);
  CHECK(invoke({"--help"}).code == kExitOk);

  const fs::path bad = dir.write("bad.ini", "[run]\nexperiment = gibbs\n[env]\nn_sites = 4\nbogus = 1\n");
  const Run r = invoke({"train", "--config", bad.string(), "--dry-run"});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("bad.ini:5") != std::string::npos);

  std::string long_run = kTiny;
  long_run.replace(long_run.find("seeds = 1, 2"), 12, "seeds = 1\nlong_run = true");
  const fs::path lr = dir.write("long.ini", long_run);
  CHECK(invoke({"train", "--config", lr.string(), "--output", dir.path.string()}).code == kExitConfig);
  CHECK(invoke({"train", "--config", lr.string(), "--output", dir.path.string(), "--dry-run"}).code == kExitOk);

  std::string diverge = kTiny;
  diverge.replace(diverge.find("[train]\n"), 8, "[train]\nlearning_rate = 1e300\nclip_norm = 1e300\n");
  const fs::path dv = dir.write("diverge.ini", diverge);
  const Run num = invoke({"train", "--config", dv.string(), "--output", dir.path.string(), "--seed", "1"});
  CHECK(num.code == kExitNumerical);
  CHECK(fs::exists(dir.path / "tiny/seed_1/checkpoints/diagnostic.bin"));

  CHECK(invoke({"oracle", "--only", "no-such-check"}).code == kExitConfig);
  const Run listing = invoke({"oracle", "--list"});
  CHECK(listing.code == kExitOk);
  CHECK(listing.out.find("backend-equivalence") != std::string::npos);
  const Run one = invoke({"oracle", "--only", "planted-power-law", "--json", (dir.path / "o.json").string()});
  CHECK(one.code == kExitOk);
  CHECK(one.out.find("\"pass\": true") != std::string::npos);
  CHECK(fs::exists(dir.path / "o.json"));
}

TEST_CASE("fit, sweep-shell and tgge commands") {
  TempDir dir("scaling");
  SUBCASE("fit against L recovers a planted exponent") {
    std::vector<std::pair<int, double>> pts;
    for (int n : {40, 60, 84, 120}) pts.push_back({n, 0.8 * std::pow(n, -0.5)});
    std::vector<std::string> args{"fit", "--config", "", "--output", dir.path.string()};
    // split over two inputs to exercise merging
    dir.write("d1.csv", distance_table_text({pts[0], pts[1]}, 1));
    dir.write("d2.csv", distance_table_text({pts[2], pts[3]}, 1));
    const fs::path cfg = dir.write("fit.ini", "[run]\nexperiment = fit\nname = f\n[env]\nbackend = xx-gauss\n"
                                              "n_sites = 60\n[target]\nkind = gge\n[scaling]\nfit_las = 1\n");
    args[2] = cfg.string();
    args.insert(args.end(), {"--input", (dir.path / "d1.csv").string(), "--input", (dir.path / "d2.csv").string()});
    const Run r = invoke(args);
    REQUIRE(r.code == kExitOk);
    const CsvTable t = read_csv(dir.path / "f/fit.csv", "fit", kFitVersion);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.text(0, "x") == "L");
    CHECK(t.number(0, "b") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(t.number(0, "a") == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(read_csv(dir.path / "f/fit_points.csv", "fit-points", kFitPointsVersion).rows.size() == 4);

    dir.write("dup.csv", distance_table_text({pts[1]}, 1));
    args.insert(args.end(), {"--input", (dir.path / "dup.csv").string()});
    CHECK(invoke(args).code == kExitFailure);
    CHECK(invoke({"fit", "--config", cfg.string(), "--output", dir.path.string()}).code == kExitConfig);
  }
  SUBCASE("fit against the shell dimension and the width sweep") {
    dir.write("g.csv", distance_table_text({{4, 0.3}, {6, 0.2}, {8, 0.12}, {10, 0.08}}, 1));
    const fs::path cfg = dir.write("g.ini", "[run]\nexperiment = fit\nname = g\n[env]\nn_sites = 10\n"
                                            "[scaling]\nenergy_cap = 10\nwidths = 0.2, 0.5, 0.75\ninputs = g.csv\n");
    const Run fit = invoke({"fit", "--config", cfg.string(), "--output", dir.path.string()});
    REQUIRE(fit.code == kExitOk);
    const CsvTable t = read_csv(dir.path / "g/fit.csv", "fit", kFitVersion);
    CHECK(t.text(0, "x") == "d");
    CHECK(t.number(0, "b") > 0.0);
    const CsvTable pts = read_csv(dir.path / "g/fit_points.csv", "fit-points", kFitPointsVersion);
    REQUIRE(pts.rows.size() == 4);
    // L=4 has a one-state shell and is left out, as in the sweep
    CHECK(pts.number(0, "abscissa") == 1);
    CHECK(pts.text(0, "included") == "0");
    for (std::size_t i = 1; i < pts.rows.size(); ++i) {
      CHECK(pts.text(i, "included") == "1");
      CHECK(pts.number(i, "abscissa") > pts.number(i - 1, "abscissa"));
    }

    const Run sw = invoke({"sweep-shell", "--config", cfg.string(), "--output", dir.path.string()});
    REQUIRE(sw.code == kExitOk);
    const CsvTable s = read_csv(dir.path / "g/sweep.csv", "sweep", kSweepVersion);
    CHECK(s.rows.size() == 12);
    // the fit at shell width 0.5 is the same fit as above
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      if (s.number(i, "width") == 0.5) CHECK(s.number(i, "b") == doctest::Approx(t.number(0, "b")).epsilon(1e-12));
    }
  }
  SUBCASE("tgge table") {
    const fs::path cfg = dir.write("t.ini", "[run]\nexperiment = tgge-distance\nname = t\n[env]\nn_sites = 16\n"
                                            "[target]\nkind = gge\n[tgge]\nsizes = 16, 24\nlas = 1, 3, 5, 8\n");
    const Run r = invoke({"tgge", "--config", cfg.string(), "--output", dir.path.string()});
    REQUIRE(r.code == kExitOk);
    const CsvTable t = read_csv(dir.path / "t/tgge.csv", "tgge", kTggeVersion);
    REQUIRE(t.rows.size() == 8);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      CHECK(t.number(i, "n_local") == 4);
      if (t.number(i, "LA") <= 5) CHECK(t.number(i, "distance") < 1e-8);
    }
    CHECK(invoke({"tgge", "--config", cfg.string(), "--output", dir.path.string(), "--dry-run"}).code == kExitOk);
  }
}
