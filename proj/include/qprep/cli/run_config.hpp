#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qprep/cli/config.hpp"
#include "qprep/env/environment.hpp"
#include "qprep/eval/distance.hpp"
#include "qprep/pauli/shell.hpp"
#include "qprep/rl/trainer.hpp"

namespace qprep::cli {

enum class ExperimentKind { Gibbs, Gge, Oracle, SweepShell, TggeDistance, Fit };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment(const std::string& s);

struct EvalSettings {
  std::vector<int> las{1, 2, 3};
  eval::DistanceNorm norm = eval::DistanceNorm::Sum;
  /// Free-evolution window after the protocol; 0 means the protocol duration.
  double relaxation = 0.0;
  /// Trajectory report columns; empty picks the defaults for the target kind.
  std::vector<std::string> report_observables;
};

struct ScalingSettings {
  /// Abscissa of the D-bar fit: "d" (shell dimension), "L", or "auto" (d for
  /// Gibbs, L for GGE).
  std::string x = "auto";
  double shell_width = 0.5;
  pauli::ShellSector sector = pauli::ShellSector::ZeroMomentumEvenReflection;
  std::vector<double> widths{0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.75};
  std::vector<int> fit_las{1};
  /// Distance tables to combine; relative paths resolve against the output root.
  std::vector<std::string> inputs;
  int shell_cap = 16;
  /// Exact diagonalization cap for the shell's upper edge <H>_beta.
  int energy_cap = 14;
};

struct TggeSettings {
  std::vector<int> sizes{60, 120};
  int n_local = 4;
  std::vector<int> las{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
};

struct RunConfig {
  ExperimentKind experiment = ExperimentKind::Gibbs;
  /// Subdirectory of the output root; defaults to the experiment kind.
  std::string name;
  std::vector<std::uint64_t> seeds{1};
  std::string output = "runs";
  /// Full-scale settings; `train` refuses them unless --long-run is given.
  bool long_run = false;
  int threads = 1;
  env::EnvConfig env;
  rl::TrainConfig train;
  EvalSettings eval;
  ScalingSettings scaling;
  TggeSettings tgge;

  void validate() const;
};

/// Unknown keys, malformed values and failed validation all raise
/// ConfigError with the source line.
RunConfig parse_run_config(IniDocument& doc);
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text, const std::string& source = "<config>");

/// Every key, in a fixed order; parse_run_config_text(to_ini(c)) reproduces c.
std::string to_ini(const RunConfig& c);

/// Canonical text of the sections that determine the training outcome
/// ([env], [physics], [target], [train], [replay]).
std::string model_text(const RunConfig& c);
std::uint64_t config_hash(const RunConfig& c);
std::string hash_hex(std::uint64_t h);

}  // namespace qprep::cli
