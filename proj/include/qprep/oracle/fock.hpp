#pragma once

#include "qprep/fermion/correlation.hpp"

namespace qprep::oracle {

// Dense Fock-space reference for the fermion backend. Fock states share the
// spin basis: bit l set means site l is occupied.

/// a_l = prod_{m<l} (1 - 2 n_m) sigma^-_l as a 2^L matrix.
ComplexMatrix annihilation(int n_sites, int l);

/// sum_ij m_ij a^dagger_i a_j + offset, assembled from annihilation().
ComplexMatrix fock_quadratic(const fermion::SingleParticleOperator& op);

/// <psi| a^dagger_i a_j |psi>.
ComplexMatrix fock_correlation(const ComplexVector& psi);
/// Tr[rho a^dagger_i a_j].
ComplexMatrix fock_correlation(const ComplexMatrix& rho);

/// Slater determinant filling the N lowest orbitals of op, built by applying
/// orbital creation operators to the vacuum.
ComplexVector slater_ground_state(const fermion::SingleParticleOperator& op, int n_particles);

/// exp(-sum h_ij a^dagger_i a_j) / Z as a dense 2^L matrix.
ComplexMatrix fock_gaussian_density(const ComplexMatrix& h);

/// Gaussian density operator with a given (strictly mixed) correlation matrix.
ComplexMatrix density_from_correlation(const ComplexMatrix& c);

/// Projector onto even particle number.
ComplexMatrix even_parity_projector(int n_sites);

/// exp(-i H t) for Hermitian dense H.
ComplexMatrix dense_unitary(const ComplexMatrix& h, double t);

}  // namespace qprep::oracle
