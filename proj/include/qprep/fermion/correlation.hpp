#pragma once

#include "qprep/fermion/single_particle.hpp"

namespace qprep::fermion {

/// Two-point function C_ij = <a^dagger_i a_j> of a number-conserving
/// Gaussian state.
struct CorrelationMatrix {
  ComplexMatrix c;
  BoundarySector sector = BoundarySector::Antiperiodic;

  int size() const { return static_cast<int>(c.rows()); }
  double particle_number() const { return c.trace().real(); }
};

/// Checks Hermiticity and the [0, 1] spectrum within tol; throws InvalidArgument.
void validate_correlation(const ComplexMatrix& c, double tol = 1e-9);

/// Projector onto the N_f lowest single-particle levels.
CorrelationMatrix ground_state_correlation(const SingleParticleOperator& op, int n_particles,
                                           BoundarySector sector = BoundarySector::Antiperiodic);

/// Grand-canonical exp(-beta op) / Z: C = f(m)^T with f the Fermi function.
CorrelationMatrix thermal_correlation(const SingleParticleOperator& op, double beta,
                                      BoundarySector sector = BoundarySector::Antiperiodic);

/// exp(-i g dt) as an L x L single-particle unitary.
ComplexMatrix single_particle_unitary(const SingleParticleOperator& g, double dt);

/// C <- conj(V) C V^T with V = exp(-i g dt), i.e. a_j -> sum_k V_jk a_k.
CorrelationMatrix evolve_correlation(const CorrelationMatrix& c, const SingleParticleOperator& g, double dt);
CorrelationMatrix evolve_correlation(const CorrelationMatrix& c, const ComplexMatrix& v);

/// <sum m_ij a^dagger_i a_j> + offset = sum_ij m_ij C_ij + offset.
double observable_expectation(const CorrelationMatrix& c, const SingleParticleOperator& op);

/// Wick-theorem variance of a quadratic operator: Tr[m (1 - C^T) m C^T].
double quadratic_variance(const CorrelationMatrix& c, const SingleParticleOperator& op);

/// Principal submatrix on [first, first + length).
ComplexMatrix block_correlation(const CorrelationMatrix& c, int first, int length);

}  // namespace qprep::fermion
