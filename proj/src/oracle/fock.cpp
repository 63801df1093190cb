#include "qprep/oracle/fock.hpp"

#include <bit>
#include <cmath>

#include "qprep/core/error.hpp"

namespace qprep::oracle {

ComplexMatrix annihilation(int n_sites, int l) {
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    if (!((s >> l) & 1)) continue;
    const int below = std::popcount(static_cast<std::uint64_t>(s) & ((std::uint64_t{1} << l) - 1));
    a(s ^ (Eigen::Index{1} << l), s) = (below % 2) ? -1.0 : 1.0;
  }
  return a;
}

ComplexMatrix fock_quadratic(const fermion::SingleParticleOperator& op) {
  const int n = op.size();
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::vector<ComplexMatrix> a;
  for (int l = 0; l < n; ++l) a.push_back(annihilation(n, l));
  ComplexMatrix out = op.scalar_offset * ComplexMatrix::Identity(dim, dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (op.matrix(i, j) != cplx{0.0, 0.0}) out += op.matrix(i, j) * a[i].adjoint() * a[j];
    }
  }
  return out;
}

ComplexMatrix fock_correlation(const ComplexVector& psi) {
  const int n = std::countr_zero(static_cast<std::uint64_t>(psi.size()));
  ComplexMatrix c(n, n);
  std::vector<ComplexVector> av;
  for (int l = 0; l < n; ++l) av.push_back(annihilation(n, l) * psi);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) c(i, j) = av[i].dot(av[j]);
  }
  return c;
}

ComplexMatrix fock_correlation(const ComplexMatrix& rho) {
  const int n = std::countr_zero(static_cast<std::uint64_t>(rho.rows()));
  std::vector<ComplexMatrix> a;
  for (int l = 0; l < n; ++l) a.push_back(annihilation(n, l));
  ComplexMatrix c(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) c(i, j) = (rho * a[i].adjoint() * a[j]).trace();
  }
  return c;
}

ComplexVector slater_ground_state(const fermion::SingleParticleOperator& op, int n_particles) {
  const int n = op.size();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(op.matrix);
  ComplexVector psi = ComplexVector::Zero(Eigen::Index{1} << n);
  psi[0] = 1.0;
  for (int k = 0; k < n_particles; ++k) {
    ComplexMatrix bdag = ComplexMatrix::Zero(psi.size(), psi.size());
    for (int i = 0; i < n; ++i) bdag += eig.eigenvectors()(i, k) * annihilation(n, i).adjoint();
    psi = bdag * psi;
  }
  return psi / psi.norm();
}

ComplexMatrix fock_gaussian_density(const ComplexMatrix& h) {
  const ComplexMatrix big = fock_quadratic({h, 0.0});
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (big + big.adjoint()));
  const RealVector& e = eig.eigenvalues();
  const double e0 = e.minCoeff();
  RealVector w = (-(e.array() - e0)).exp().matrix();
  w /= w.sum();
  return eig.eigenvectors() * w.cast<cplx>().asDiagonal() * eig.eigenvectors().adjoint();
}

ComplexMatrix density_from_correlation(const ComplexMatrix& c) {
  const ComplexMatrix g = c.transpose();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (g + g.adjoint()));
  RealVector h(g.rows());
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    const double nu = eig.eigenvalues()[i];
    QPREP_REQUIRE(nu > 0.0 && nu < 1.0, "density_from_correlation: needs a strictly mixed state");
    h[i] = std::log((1.0 - nu) / nu);
  }
  return fock_gaussian_density(eig.eigenvectors() * h.cast<cplx>().asDiagonal() * eig.eigenvectors().adjoint());
}

ComplexMatrix even_parity_projector(int n_sites) {
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    if (std::popcount(static_cast<std::uint64_t>(s)) % 2 == 0) p(s, s) = 1.0;
  }
  return p;
}

ComplexMatrix dense_unitary(const ComplexMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (h + h.adjoint()));
  ComplexVector ph(h.rows());
  for (Eigen::Index i = 0; i < ph.size(); ++i) ph[i] = std::exp(cplx{0.0, -t * eig.eigenvalues()[i]});
  return eig.eigenvectors() * ph.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace qprep::oracle
