#pragma once

#include <map>
#include <vector>

#include "qprep/fermion/correlation.hpp"

namespace qprep::fermion {

/// Identifies the LIOM I_n^sign.
struct MomentKey {
  int n;
  int sign;
  friend bool operator<(const MomentKey& a, const MomentKey& b) {
    return a.n != b.n ? a.n < b.n : a.sign > b.sign;
  }
  friend bool operator==(const MomentKey& a, const MomentKey& b) { return a.n == b.n && a.sign == b.sign; }
};

/// exp(-sum lambda_n^s I_n^s) / Z. plus[n], n = 0..L/2; minus[0] is unused and
/// must stay 0.
struct GgeSpec {
  int n_sites = 0;
  double J = 1.0;
  BoundarySector sector = BoundarySector::Antiperiodic;
  std::vector<double> plus;
  std::vector<double> minus;

  static GgeSpec zero(int n_sites, double J = 1.0, BoundarySector sector = BoundarySector::Antiperiodic);
  /// lambda_0^+ = beta h / J, lambda_1^+ = beta: the Gibbs state of tb_matrix.
  static GgeSpec gibbs(int n_sites, double beta, double J, double h,
                       BoundarySector sector = BoundarySector::Antiperiodic);
  double multiplier(MomentKey key) const;
  void set_multiplier(MomentKey key, double value);
};

struct GgeTarget {
  int n_sites = 0;
  double J = 1.0;
  BoundarySector sector = BoundarySector::Antiperiodic;
  std::map<MomentKey, double> expectations;
  int n_local = 4;
  double beta_ref = 0.0;
  double epsilon_I = 0.0;
};

/// n_k = 1 / (1 + exp(sum lambda c(k))) at the sector momenta; the exponent is
/// clamped to [-700, 700].
RealVector gge_occupations(const GgeSpec& spec);

/// sum_k c_n^s(k) n_k.
double gge_moment(const GgeSpec& spec, MomentKey key);
double occupation_moment(const RealVector& occupations, const RealVector& k, MomentKey key, double J);

/// C_ij = L^{-1} sum_k n_k exp(-ik(i - j)).
CorrelationMatrix gge_correlation_matrix(const GgeSpec& spec);

struct SolverOptions {
  int max_iterations = 200;
  /// Converged once every residual is below tol_per_site * L.
  double tol_per_site = 1e-10;
};

struct SolverReport {
  int iterations = 0;
  double max_residual = 0.0;
};

/// Newton iteration on the convex dual of the moment-matching problem,
/// starting from lambda = 0. Multipliers of keys absent from the target stay 0.
GgeSpec solve_gge_multipliers(const GgeTarget& target, const SolverOptions& opts = {}, SolverReport* report = nullptr);

/// Targets built from the Gibbs state at beta: n in {0, 1} keep the Gibbs
/// value, 2 <= n <= deviation_max_n are shifted by epsilon_I * L, the rest of
/// 2 <= n < L/2 keep the Gibbs value, <I_{L/2}^+> = 0 and every I_n^- keeps its
/// Gibbs value. deviation_max_n < 0 means L/2 - 1.
GgeTarget deformed_gibbs_targets(int n_sites, double beta, double epsilon_I, double J, double h,
                             int deviation_max_n = -1, BoundarySector sector = BoundarySector::Antiperiodic);

/// Targets matching the moments of `spec` for n <= n_local (both signs).
GgeTarget truncated_targets(const GgeSpec& spec, int n_local);

}  // namespace qprep::fermion
