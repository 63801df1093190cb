#pragma once

#include <string>
#include <vector>

#include "qprep/core/types.hpp"

namespace qprep::fermion {

// Jordan-Wigner convention: a_l = prod_{m<l} (1 - 2 n_m) sigma^-_l, a particle
// is a spin up. With this string the spin-chain XX Hamiltonian maps onto the
// tight-binding form term by term; hopping across the ring boundary picks up
// the sign -(-1)^N, so even particle numbers live in the antiperiodic sector.

enum class BoundarySector { Periodic, Antiperiodic };

std::string to_string(BoundarySector s);

/// sum_ij m_ij a^dagger_i a_j + scalar_offset.
struct SingleParticleOperator {
  ComplexMatrix matrix;
  double scalar_offset = 0.0;

  int size() const { return static_cast<int>(matrix.rows()); }
  bool is_zero(double tol = 0.0) const;
};

/// Allowed momenta: 2 pi m / L (periodic) or pi (2m + 1) / L (antiperiodic),
/// m = 0 .. L-1.
RealVector momenta(int n_sites, BoundarySector sector);

/// -sum_l [ J (a^dagger_l a_{l+1} + h.c.) + 2h (n_l - 1/2) ].
SingleParticleOperator tb_matrix(int n_sites, double J, double h, BoundarySector sector);

/// LIOMs: I_n^+ = -J sum_l (a^dagger_l a_{l+n} + h.c.),
/// I_n^- = iJ sum_l (a^dagger_l a_{l+n} - h.c.), 0 <= n <= L/2.
SingleParticleOperator liom_matrix(int n_sites, int n, int sign, BoundarySector sector, double J = 1.0);

/// Momentum symbol of a LIOM: -2J cos(nk) for sign +1, -2J sin(nk) for sign -1.
double liom_symbol(int n, int sign, double k, double J = 1.0);

/// Total particle number.
SingleParticleOperator number_operator(int n_sites);

/// sum_{l=1}^{L} f(l) n_l with the site label l running from 1 (site index l-1).
SingleParticleOperator density_modulation(int n_sites, const std::vector<double>& weights);

/// sum_{l=1}^{L} w_l (a^dagger_l a_{l+j} + h.c.); bonds crossing the ring
/// boundary take the sector sign.
SingleParticleOperator hopping_modulation(int n_sites, int j, const std::vector<double>& weights,
                                          BoundarySector sector);

/// The fifteen control generators in action-index order:
/// 0 H_XX; 1-3 density cos(m pi l / L), m in {2, 4, L}; 4-6 density sin(...);
/// 7-10 hopping cos(n pi l / L), (j, n) in {(1,2), (2,2), (1,L), (2,L)};
/// 11-14 hopping sin(...).
inline constexpr int kXxGeneratorCount = 15;
SingleParticleOperator build_generator_xx(int index, int n_sites, double J, double h, BoundarySector sector);
std::string xx_generator_name(int index);

/// [A, B] Frobenius norm.
double commutator_norm(const SingleParticleOperator& a, const SingleParticleOperator& b);

}  // namespace qprep::fermion
