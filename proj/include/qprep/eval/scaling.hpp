#pragma once

#include <utility>
#include <vector>

#include "qprep/eval/distance.hpp"
#include "qprep/fermion/gge.hpp"
#include "qprep/pauli/pauli_string.hpp"
#include "qprep/pauli/shell.hpp"

namespace qprep::eval {

/// ys ~ a xs^{-b}, from least squares on log y = log a - b log x.
struct ScalingFit {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> sigmas;
  double a = 0.0;
  double b = 0.0;
  double a_err = 0.0;
  double b_err = 0.0;
  /// Sum of squared log-space residuals.
  double residual = 0.0;
};

/// At least three positive points with strictly increasing xs. With sigmas the
/// fit is weighted by (y / sigma)^2, i.e. sigma propagated to log y; without
/// them the standard errors come from the residual variance.
ScalingFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys,
                         const std::vector<double>& sigmas = {});

struct ShellPoint {
  int n_sites = 0;
  double dbar = 0.0;
  double sigma = 0.0;
  /// Upper edge of the shell: the target ensemble's total energy <H>_beta.
  double energy = 0.0;
};

struct ShellSweepRow {
  double width = 0.0;
  int n_sites = 0;
  long d = 0;
  /// False when d <= 1 or the point could not enter the fit.
  bool included = false;
  /// Exponent of dbar ~ d^{-b} over the included points at this width (NaN
  /// when fewer than three remain).
  double b = 0.0;
  double b_err = 0.0;
};

/// <H_Ising>_beta over the full spectrum (exact diagonalization up to `cap`).
double ising_thermal_energy(int n_sites, double beta, const pauli::IsingCouplings& params, int cap = 14);

std::vector<ShellSweepRow> shell_width_sweep(const pauli::IsingCouplings& params, const std::vector<ShellPoint>& points,
                                             const std::vector<double>& widths,
                                             pauli::ShellSector sector = pauli::ShellSector::ZeroMomentumEvenReflection,
                                             int cap = 16);

/// Widest run of consecutive widths whose exponents stay within rel_tol of the
/// run's first exponent. Returns (lo, hi) widths; NaNs when no width has an
/// exponent.
std::pair<double, double> sweep_plateau(const std::vector<ShellSweepRow>& rows, double rel_tol = 0.1);

struct TggeRow {
  int la = 0;
  double distance = 0.0;
};

/// Distance between the blocks [0, LA) of `target` and of its truncated GGE
/// that matches the moments n <= n_local.
std::vector<TggeRow> tgge_vs_gge(const fermion::GgeSpec& target, int n_local, const std::vector<int>& las,
                                 DistanceNorm norm = DistanceNorm::Sum);

}  // namespace qprep::eval
