#include "qprep/pauli/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qprep/core/error.hpp"

namespace qprep::pauli {

namespace {
constexpr double kRoundingFloor = 1e-14;
}  // namespace

ComplexVector krylov_expv(const LinearMap& apply, double norm_bound, const ComplexVector& v, cplx s,
                          const PropagatorOptions& opts) {
  QPREP_REQUIRE(opts.tol > 0.0, "krylov_expv: tolerance must be positive");
  const Eigen::Index n = v.size();
  if (n == 0 || s == cplx{0.0, 0.0}) return v;
  const Eigen::Index m_max = std::min<Eigen::Index>(std::max(opts.max_krylov_dim, 2), n);
  const double breakdown_tol = 1e-13 * std::max(1.0, norm_bound);

  ComplexMatrix basis(n, m_max);
  ComplexVector work(n);
  std::vector<double> alpha(static_cast<std::size_t>(m_max)), beta(static_cast<std::size_t>(m_max));

  ComplexVector w = v;
  double remaining = 1.0;
  double fraction = 1.0;
  int restarts = 0;
  while (remaining > 1e-15) {
    if (++restarts > opts.max_restarts) {
      throw NumericalError("krylov_expv: no convergence within the restart cap");
    }
    const double beta0 = w.norm();
    if (beta0 == 0.0) return w;
    basis.col(0) = w / beta0;

    Eigen::Index m = 0;
    bool breakdown = false;
    for (Eigen::Index j = 0; j < m_max; ++j) {
      apply(basis.col(j), work);
      const double a = basis.col(j).dot(work).real();
      work -= a * basis.col(j);
      if (j > 0) work -= beta[static_cast<std::size_t>(j - 1)] * basis.col(j - 1);
      for (Eigen::Index i = 0; i <= j; ++i) work -= basis.col(i).dot(work) * basis.col(i);
      const double b = work.norm();
      alpha[static_cast<std::size_t>(j)] = a;
      m = j + 1;
      if (b < breakdown_tol) {
        breakdown = true;
        break;
      }
      beta[static_cast<std::size_t>(j)] = b;
      if (j + 1 < m_max) basis.col(j + 1) = work / b;
    }

    Eigen::SelfAdjointEigenSolver<RealMatrix> eig;
    {
      RealVector diag(m), sub(std::max<Eigen::Index>(m - 1, 0));
      for (Eigen::Index i = 0; i < m; ++i) diag[i] = alpha[static_cast<std::size_t>(i)];
      for (Eigen::Index i = 0; i + 1 < m; ++i) sub[i] = beta[static_cast<std::size_t>(i)];
      eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    }
    const RealMatrix& q = eig.eigenvectors();
    const RealVector& lam = eig.eigenvalues();
    const double residual_norm = breakdown ? 0.0 : beta[static_cast<std::size_t>(m - 1)];

    double step = std::min(fraction, remaining);
    ComplexVector y(m);
    for (int attempt = 0;; ++attempt) {
      ComplexVector coeff(m);
      for (Eigen::Index i = 0; i < m; ++i) coeff[i] = std::exp(step * s * lam[i]) * q(0, i);
      y = q.cast<cplx>() * coeff;
      const double err = residual_norm * std::abs(y[m - 1]);
      const double scale = y.norm();
      // the estimate bottoms out at rounding level; accept there instead of
      // shrinking the step forever
      if (err <= opts.tol * step * std::max(scale, 1e-300) || err <= kRoundingFloor * scale || breakdown) break;
      if (attempt > 60) throw NumericalError("krylov_expv: step size underflow");
      step *= 0.5;
    }
    w = beta0 * (basis.leftCols(m) * y);
    remaining -= step;
    fraction = std::min(1.0, 2.0 * step);
  }
  return w;
}

ComplexMatrix dense_exponential(const SpinHamiltonian& g, cplx s) {
  const ComplexMatrix m = g.dense();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(m);
  const ComplexMatrix& u = eig.eigenvectors();
  ComplexVector phase(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) phase[i] = std::exp(s * eig.eigenvalues()[i]);
  return u * phase.asDiagonal() * u.adjoint();
}

StateVector propagate(const StateVector& psi, const SpinHamiltonian& g, double dt, double tol) {
  PropagatorOptions opts;
  opts.tol = tol;
  return propagate(psi, g, dt, opts);
}

StateVector propagate(const StateVector& psi, const SpinHamiltonian& g, double dt, const PropagatorOptions& opts) {
  QPREP_REQUIRE(opts.tol > 0.0 && opts.tol <= 1e-6, "propagate: tol must lie in (0, 1e-6]");
  return GeneratorPropagator(g, dt, opts).apply(psi);
}

ComplexVector imaginary_time_evolve(const CompiledOperator& h, const ComplexVector& v, double tau,
                                    const PropagatorOptions& opts) {
  const LinearMap apply = [&h](const ComplexVector& in, ComplexVector& out) { h.apply(in, out); };
  return krylov_expv(apply, h.norm_bound(), v, cplx{-tau, 0.0}, opts);
}

GeneratorPropagator::GeneratorPropagator(const SpinHamiltonian& g, double dt, const PropagatorOptions& opts)
    : n_sites_(g.n_sites()), dt_(dt), opts_(opts) {
  QPREP_REQUIRE(std::isfinite(dt), "GeneratorPropagator: dt must be finite");
  if (g.empty() || dt == 0.0) {
    identity_ = true;
    return;
  }
  dense_ = opts.method == PropagatorMethod::Dense ||
           (opts.method == PropagatorMethod::Auto && n_sites_ < opts.dense_below);
  if (dense_) {
    unitary_ = dense_exponential(g, cplx{0.0, -dt});
  } else {
    op_ = CompiledOperator(g);
  }
}

StateVector GeneratorPropagator::apply(const StateVector& psi) const {
  QPREP_REQUIRE(psi.n_sites() == n_sites_, "GeneratorPropagator::apply: size mismatch");
  if (identity_) return psi;
  if (dense_) return StateVector(n_sites_, unitary_ * psi.amplitudes());
  const LinearMap apply = [this](const ComplexVector& in, ComplexVector& out) { op_.apply(in, out); };
  return StateVector(n_sites_, krylov_expv(apply, op_.norm_bound(), psi.amplitudes(), cplx{0.0, -dt_}, opts_));
}

}  // namespace qprep::pauli
