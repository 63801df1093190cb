#include "qprep/fermion/gge.hpp"

#include <cmath>
#include <sstream>

#include "qprep/core/error.hpp"

namespace qprep::fermion {

namespace {

void check_key(int n_sites, MomentKey key) {
  QPREP_REQUIRE(key.sign == 1 || key.sign == -1, "moment sign must be +1 or -1");
  QPREP_REQUIRE(key.n >= 0 && key.n <= n_sites / 2, "moment range n must lie in [0, L/2]");
  QPREP_REQUIRE(key.sign == 1 || key.n >= 1, "I_n^- requires n >= 1");
}

}  // namespace

GgeSpec GgeSpec::zero(int n_sites, double J, BoundarySector sector) {
  QPREP_REQUIRE(n_sites >= 4 && n_sites % 2 == 0, "GgeSpec: L must be even and at least 4");
  GgeSpec s;
  s.n_sites = n_sites;
  s.J = J;
  s.sector = sector;
  s.plus.assign(static_cast<std::size_t>(n_sites / 2 + 1), 0.0);
  s.minus.assign(static_cast<std::size_t>(n_sites / 2 + 1), 0.0);
  return s;
}

GgeSpec GgeSpec::gibbs(int n_sites, double beta, double J, double h, BoundarySector sector) {
  GgeSpec s = zero(n_sites, J, sector);
  s.plus[0] = beta * h / J;
  s.plus[1] = beta;
  return s;
}

double GgeSpec::multiplier(MomentKey key) const {
  check_key(n_sites, key);
  return key.sign == 1 ? plus[static_cast<std::size_t>(key.n)] : minus[static_cast<std::size_t>(key.n)];
}

void GgeSpec::set_multiplier(MomentKey key, double value) {
  check_key(n_sites, key);
  QPREP_REQUIRE(std::isfinite(value), "GgeSpec: multipliers must be finite");
  (key.sign == 1 ? plus : minus)[static_cast<std::size_t>(key.n)] = value;
}

RealVector gge_occupations(const GgeSpec& spec) {
  QPREP_REQUIRE(static_cast<int>(spec.plus.size()) == spec.n_sites / 2 + 1 &&
                    spec.minus.size() == spec.plus.size(),
                "gge_occupations: malformed spec");
  QPREP_REQUIRE(spec.minus[0] == 0.0, "gge_occupations: lambda_0^- is undefined and must be 0");
  const RealVector k = momenta(spec.n_sites, spec.sector);
  RealVector occ(k.size());
  for (Eigen::Index m = 0; m < k.size(); ++m) {
    double theta = 0.0;
    for (int n = 0; n <= spec.n_sites / 2; ++n) {
      const auto i = static_cast<std::size_t>(n);
      if (spec.plus[i] != 0.0) theta += spec.plus[i] * liom_symbol(n, 1, k[m], spec.J);
      if (spec.minus[i] != 0.0) theta += spec.minus[i] * liom_symbol(n, -1, k[m], spec.J);
    }
    occ[m] = 1.0 / (1.0 + std::exp(std::clamp(theta, -700.0, 700.0)));
  }
  return occ;
}

double occupation_moment(const RealVector& occupations, const RealVector& k, MomentKey key, double J) {
  double acc = 0.0;
  for (Eigen::Index m = 0; m < k.size(); ++m) acc += liom_symbol(key.n, key.sign, k[m], J) * occupations[m];
  return acc;
}

double gge_moment(const GgeSpec& spec, MomentKey key) {
  check_key(spec.n_sites, key);
  return occupation_moment(gge_occupations(spec), momenta(spec.n_sites, spec.sector), key, spec.J);
}

CorrelationMatrix gge_correlation_matrix(const GgeSpec& spec) {
  const RealVector occ = gge_occupations(spec);
  const RealVector k = momenta(spec.n_sites, spec.sector);
  const int n = spec.n_sites;
  // Toeplitz up to the boundary twist: C_ij depends on i - j only
  ComplexVector row(2 * n - 1);
  for (int d = -(n - 1); d <= n - 1; ++d) {
    cplx acc = 0.0;
    for (int m = 0; m < n; ++m) acc += occ[m] * std::exp(cplx{0.0, -k[m] * d});
    row[d + n - 1] = acc / static_cast<double>(n);
  }
  ComplexMatrix c(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) c(i, j) = row[i - j + n - 1];
  }
  return {0.5 * (c + c.adjoint()), spec.sector};
}

GgeSpec solve_gge_multipliers(const GgeTarget& target, const SolverOptions& opts, SolverReport* report) {
  const int n_sites = target.n_sites;
  GgeSpec spec = GgeSpec::zero(n_sites, target.J, target.sector);
  const RealVector k = momenta(n_sites, target.sector);
  const double tol = opts.tol_per_site * n_sites;

  // Symbols that vanish on every momentum carry no constraint; their target
  // must then vanish too.
  std::vector<MomentKey> keys;
  std::vector<double> goals;
  for (const auto& [key, value] : target.expectations) {
    check_key(n_sites, key);
    QPREP_REQUIRE(std::isfinite(value), "solve_gge_multipliers: targets must be finite");
    double symbol_max = 0.0;
    for (Eigen::Index m = 0; m < k.size(); ++m) {
      symbol_max = std::max(symbol_max, std::abs(liom_symbol(key.n, key.sign, k[m], target.J)));
    }
    if (symbol_max < 1e-12) {
      if (std::abs(value) > tol) {
        std::ostringstream os;
        os << "infeasible target: I_" << key.n << (key.sign == 1 ? "^+" : "^-")
           << " vanishes identically in this sector but the target is " << value;
        throw InfeasibleError(os.str());
      }
      continue;
    }
    keys.push_back(key);
    goals.push_back(value);
  }
  const auto dim = static_cast<Eigen::Index>(keys.size());
  if (dim == 0) return spec;

  RealMatrix sym(dim, k.size());
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index m = 0; m < k.size(); ++m) {
      sym(i, m) = liom_symbol(keys[static_cast<std::size_t>(i)].n, keys[static_cast<std::size_t>(i)].sign, k[m],
                              target.J);
    }
  }
  const RealVector t = Eigen::Map<const RealVector>(goals.data(), dim);

  // A complete constraint set fixes every occupation linearly; check them first
  // so an impossible target is reported by mode rather than as a stall.
  Eigen::ColPivHouseholderQR<RealMatrix> qr(sym);
  if (qr.rank() == k.size()) {
    const RealVector occ = qr.solve(t);
    if ((sym * occ - t).cwiseAbs().maxCoeff() > tol) {
      throw InfeasibleError("infeasible target: moment system is inconsistent");
    }
    for (Eigen::Index m = 0; m < k.size(); ++m) {
      if (!(occ[m] > 0.0 && occ[m] < 1.0)) {
        std::ostringstream os;
        os << "infeasible target: momentum mode k=" << k[m] << " (index " << m << ") would need occupation "
           << occ[m] << ", outside (0, 1)";
        throw InfeasibleError(os.str());
      }
    }
  }

  RealVector lambda = RealVector::Zero(dim);
  auto evaluate = [&](const RealVector& lam, RealVector& occ) {
    const RealVector theta = sym.transpose() * lam;
    occ.resize(k.size());
    double f = lam.dot(t);
    for (Eigen::Index m = 0; m < k.size(); ++m) {
      const double th = std::clamp(theta[m], -700.0, 700.0);
      occ[m] = 1.0 / (1.0 + std::exp(th));
      // log(1 + e^{-th}) without overflow
      f += th > 0 ? std::log1p(std::exp(-th)) : -th + std::log1p(std::exp(th));
    }
    return f;
  };

  RealVector occ;
  double f = evaluate(lambda, occ);
  int it = 0;
  double max_res = 0.0;
  for (;; ++it) {
    const RealVector residual = sym * occ - t;
    max_res = residual.cwiseAbs().maxCoeff();
    if (max_res <= tol) break;
    if (it >= opts.max_iterations) {
      std::ostringstream os;
      os << "solve_gge_multipliers: no convergence after " << opts.max_iterations
         << " iterations (max residual " << max_res << ")";
      throw NumericalError(os.str());
    }
    const RealVector w = (occ.array() * (1.0 - occ.array())).matrix();
    RealMatrix hess = sym * w.asDiagonal() * sym.transpose();
    const double ridge = 1e-14 * std::max(1.0, hess.trace());
    hess.diagonal().array() += ridge;
    // gradient of the dual is t - sym n = -residual
    const RealVector step = hess.ldlt().solve(residual);
    const double slope = -residual.dot(step);
    double alpha = 1.0;
    RealVector trial_occ;
    double trial_f = evaluate(lambda + step, trial_occ);
    // Near the optimum the predicted decrease is below the rounding of F, so
    // Armijo cannot discriminate; the full Newton step is taken there.
    if (std::abs(slope) > 1e-12 * std::max(1.0, std::abs(f))) {
      for (int ls = 0; ls < 60 && trial_f > f + 1e-4 * alpha * slope; ++ls) {
        alpha *= 0.5;
        trial_f = evaluate(lambda + alpha * step, trial_occ);
      }
    }
    lambda += alpha * step;
    occ = trial_occ;
    f = trial_f;
  }

  for (Eigen::Index i = 0; i < dim; ++i) spec.set_multiplier(keys[static_cast<std::size_t>(i)], lambda[i]);
  if (report) {
    report->iterations = it;
    report->max_residual = max_res;
  }
  return spec;
}

GgeTarget deformed_gibbs_targets(int n_sites, double beta, double epsilon_I, double J, double h, int deviation_max_n,
                             BoundarySector sector) {
  QPREP_REQUIRE(n_sites >= 4 && n_sites % 2 == 0, "deformed_gibbs_targets: L must be even and at least 4");
  QPREP_REQUIRE(beta >= 0.0 && std::isfinite(beta), "deformed_gibbs_targets: beta must be finite and non-negative");
  const int half = n_sites / 2;
  if (deviation_max_n < 0) deviation_max_n = half - 1;
  QPREP_REQUIRE(deviation_max_n < half, "deformed_gibbs_targets: deviation_max_n must be below L/2");

  const GgeSpec gibbs = GgeSpec::gibbs(n_sites, beta, J, h, sector);
  const RealVector occ = gge_occupations(gibbs);
  const RealVector k = momenta(n_sites, sector);
  GgeTarget target;
  target.n_sites = n_sites;
  target.J = J;
  target.sector = sector;
  target.beta_ref = beta;
  target.epsilon_I = epsilon_I;
  for (int n = 0; n < half; ++n) {
    double v = occupation_moment(occ, k, {n, 1}, J);
    if (n >= 2 && n <= deviation_max_n) v += epsilon_I * n_sites;
    target.expectations[{n, 1}] = v;
  }
  target.expectations[{half, 1}] = 0.0;
  for (int n = 1; n <= half; ++n) target.expectations[{n, -1}] = occupation_moment(occ, k, {n, -1}, J);
  return target;
}

GgeTarget truncated_targets(const GgeSpec& spec, int n_local) {
  QPREP_REQUIRE(n_local >= 0 && n_local <= spec.n_sites / 2, "truncated_targets: n_local must lie in [0, L/2]");
  const RealVector occ = gge_occupations(spec);
  const RealVector k = momenta(spec.n_sites, spec.sector);
  GgeTarget target;
  target.n_sites = spec.n_sites;
  target.J = spec.J;
  target.sector = spec.sector;
  target.n_local = n_local;
  for (int n = 0; n <= n_local; ++n) {
    target.expectations[{n, 1}] = occupation_moment(occ, k, {n, 1}, spec.J);
    if (n >= 1) target.expectations[{n, -1}] = occupation_moment(occ, k, {n, -1}, spec.J);
  }
  return target;
}

}  // namespace qprep::fermion
