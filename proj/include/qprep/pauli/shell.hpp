#pragma once

#include <cstdint>
#include <vector>

#include "qprep/pauli/pauli_string.hpp"

namespace qprep::pauli {

enum class ShellSector { Full, ZeroMomentumEvenReflection };

/// Orbits of the computational basis under translations and the reflection
/// l -> L-1-l. Each orbit carries one symmetric state, so the orbit count is
/// the dimension of the zero-momentum, even-reflection sector.
class SymmetricBasis {
 public:
  explicit SymmetricBasis(int n_sites);

  int n_sites() const { return n_sites_; }
  std::size_t dimension() const { return representatives_.size(); }
  const std::vector<std::uint64_t>& representatives() const { return representatives_; }
  const std::vector<int>& orbit_sizes() const { return orbit_sizes_; }
  /// Orbit index of an arbitrary basis state.
  int orbit_of(std::uint64_t state) const { return orbit_of_[state]; }

  /// Matrix of a translation- and reflection-invariant operator in this sector.
  /// The operator must be real (no odd Y count).
  RealMatrix project(const SpinHamiltonian& h) const;

 private:
  int n_sites_;
  std::vector<std::uint64_t> representatives_;
  std::vector<int> orbit_sizes_;
  std::vector<int> orbit_of_;
};

/// Eigenvalues of h restricted to the chosen sector, ascending.
RealVector sector_spectrum(const SpinHamiltonian& h, ShellSector sector, int cap = 16);

/// Number of eigenvalues in [E_hi - width * L, E_hi].
long count_in_shell(const RealVector& spectrum, double e_hi, double width, int n_sites);

long shell_dimension(const SpinHamiltonian& h, double e_hi, double width, ShellSector sector, int cap = 16);

}  // namespace qprep::pauli
