#pragma once

#include <random>

#include "qprep/core/types.hpp"
#include "qprep/pauli/pauli_string.hpp"

namespace qprep::pauli {

/// Normalized pure state on 2^L amplitudes.
class StateVector {
 public:
  StateVector() = default;

  /// Normalizes `amplitudes`; throws on a zero vector or wrong length.
  StateVector(int n_sites, ComplexVector amplitudes);

  static StateVector all_down(int n_sites);
  static StateVector basis(int n_sites, std::uint64_t index);
  /// Haar-random state from complex Gaussian amplitudes.
  static StateVector haar_random(int n_sites, std::mt19937_64& rng);

  int n_sites() const { return n_sites_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amplitudes_.size()); }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  double norm() const { return amplitudes_.norm(); }

 private:
  int n_sites_ = 0;
  ComplexVector amplitudes_;
};

/// H psi without forming the 2^L x 2^L matrix. The result is not normalized.
ComplexVector apply_hamiltonian(const SpinHamiltonian& h, const StateVector& psi);

/// <psi|O|psi>; the imaginary residue must be below 1e-10 and is dropped.
double expectation(const StateVector& psi, const SpinHamiltonian& o);
double expectation(const StateVector& psi, const CompiledOperator& o);

/// <O^2> - <O>^2, clamped to zero when the rounding floor goes negative.
double variance(const StateVector& psi, const SpinHamiltonian& o);
double variance(const StateVector& psi, const CompiledOperator& o);

}  // namespace qprep::pauli
