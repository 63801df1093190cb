#include "qprep/fermion/correlation.hpp"

#include <cmath>
#include <sstream>

#include "qprep/core/error.hpp"

namespace qprep::fermion {

void validate_correlation(const ComplexMatrix& c, double tol) {
  QPREP_REQUIRE(c.rows() == c.cols(), "correlation matrix must be square");
  const double asym = (c - c.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol) {
    std::ostringstream os;
    os << "correlation matrix not Hermitian (deviation " << asym << ")";
    throw InvalidArgument(os.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (c + c.adjoint()), Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo < -tol || hi > 1.0 + tol) {
    std::ostringstream os;
    os << "correlation spectrum outside [0,1]: [" << lo << ", " << hi << "]";
    throw InvalidArgument(os.str());
  }
}

CorrelationMatrix ground_state_correlation(const SingleParticleOperator& op, int n_particles, BoundarySector sector) {
  const int n = op.size();
  QPREP_REQUIRE(n_particles >= 0 && n_particles <= n, "ground_state_correlation: N_f must be in [0, L]");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(op.matrix);
  const RealVector& e = eig.eigenvalues();
  if (n_particles > 0 && n_particles < n) {
    const double gap = e[n_particles] - e[n_particles - 1];
    const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
    if (gap <= 1e-10 * scale) {
      std::ostringstream os;
      os << "ground state degenerate at the Fermi level: gap " << gap << " between levels " << n_particles - 1
         << " and " << n_particles;
      throw DegeneracyError(os.str());
    }
  }
  const ComplexMatrix occ = eig.eigenvectors().leftCols(n_particles);
  ComplexMatrix p = occ * occ.adjoint();
  return {p.transpose(), sector};
}

CorrelationMatrix thermal_correlation(const SingleParticleOperator& op, double beta, BoundarySector sector) {
  QPREP_REQUIRE(beta >= 0.0 && std::isfinite(beta), "thermal_correlation: beta must be finite and non-negative");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(op.matrix);
  RealVector f(op.size());
  for (int i = 0; i < op.size(); ++i) {
    const double x = std::clamp(beta * eig.eigenvalues()[i], -700.0, 700.0);
    f[i] = 1.0 / (1.0 + std::exp(x));
  }
  const ComplexMatrix& u = eig.eigenvectors();
  ComplexMatrix fm = u * f.cast<cplx>().asDiagonal() * u.adjoint();
  return {fm.transpose(), sector};
}

ComplexMatrix single_particle_unitary(const SingleParticleOperator& g, double dt) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(g.matrix);
  ComplexVector phase(g.size());
  for (int i = 0; i < g.size(); ++i) phase[i] = std::exp(cplx{0.0, -dt * eig.eigenvalues()[i]});
  return eig.eigenvectors() * phase.asDiagonal() * eig.eigenvectors().adjoint();
}

CorrelationMatrix evolve_correlation(const CorrelationMatrix& c, const ComplexMatrix& v) {
  QPREP_REQUIRE(v.rows() == c.c.rows() && v.cols() == c.c.cols(), "evolve_correlation: size mismatch");
  ComplexMatrix out = v.conjugate() * c.c * v.transpose();
  return {0.5 * (out + out.adjoint()), c.sector};
}

CorrelationMatrix evolve_correlation(const CorrelationMatrix& c, const SingleParticleOperator& g, double dt) {
  QPREP_REQUIRE(g.size() == c.size(), "evolve_correlation: size mismatch");
  if (dt == 0.0) return c;
  return evolve_correlation(c, single_particle_unitary(g, dt));
}

double observable_expectation(const CorrelationMatrix& c, const SingleParticleOperator& op) {
  QPREP_REQUIRE(op.size() == c.size(), "observable_expectation: size mismatch");
  const cplx v = (op.matrix.array() * c.c.array()).sum();
  if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v.real()))) {
    throw NumericalError("observable_expectation: non-negligible imaginary part");
  }
  return v.real() + op.scalar_offset;
}

double quadratic_variance(const CorrelationMatrix& c, const SingleParticleOperator& op) {
  QPREP_REQUIRE(op.size() == c.size(), "quadratic_variance: size mismatch");
  const ComplexMatrix ct = c.c.transpose();
  const ComplexMatrix id = ComplexMatrix::Identity(c.size(), c.size());
  const double v = (op.matrix * (id - ct) * op.matrix * ct).trace().real();
  return std::max(0.0, v);
}

ComplexMatrix block_correlation(const CorrelationMatrix& c, int first, int length) {
  QPREP_REQUIRE(length >= 1 && first >= 0 && first + length <= c.size(),
                "block_correlation: block must be a contiguous range inside [0, L)");
  return c.c.block(first, first, length, length);
}

}  // namespace qprep::fermion
