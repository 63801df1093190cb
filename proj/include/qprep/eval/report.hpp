#pragma once

#include <string>
#include <vector>

#include "qprep/env/environment.hpp"
#include "qprep/fermion/gge.hpp"

namespace qprep::eval {

/// Observable dynamics of one protocol: the control phase from t = 0 followed
/// by optional free relaxation.
struct TrajectoryReport {
  std::vector<std::string> observables;
  std::vector<double> times;
  /// Action applied to reach the row; -1 for t = 0 and relaxation rows.
  std::vector<int> actions;
  /// Rows follow `times`, columns follow `observables`.
  RealMatrix values;
  RealVector target;
  /// Gibbs ensemble sharing particle number and energy with the target GGE;
  /// NaN for Gibbs targets.
  RealVector relevant_gibbs;
};

/// Z1..Z3 for Gibbs runs; I_n^+ / L and Gamma_n for n <= min(8, L/2) for GGE runs.
std::vector<std::string> default_report_observables(const env::EnvConfig& cfg);

/// Multipliers of the grand-canonical Gibbs state whose n = 0, 1 moments match `target`.
fermion::GgeSpec relevant_gibbs(const fermion::GgeSpec& target);

TrajectoryReport trajectory_report(const env::EnvConfig& cfg, const env::EnsembleTarget& target,
                                   const std::vector<int>& protocol, const std::vector<std::string>& observables,
                                   double relaxation = 0.0);

}  // namespace qprep::eval
