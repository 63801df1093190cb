#pragma once

#include <functional>

#include "qprep/pauli/state_vector.hpp"

namespace qprep::pauli {

enum class PropagatorMethod { Auto, Krylov, Dense };

struct PropagatorOptions {
  double tol = 1e-12;
  int max_krylov_dim = 30;
  /// Iteration cap on Krylov restarts within one call.
  int max_restarts = 20000;
  PropagatorMethod method = PropagatorMethod::Auto;
  /// Auto picks the dense eigendecomposition for L below this.
  int dense_below = 10;
};

/// y = out, x = in; must represent a Hermitian operator.
using LinearMap = std::function<void(const ComplexVector& in, ComplexVector& out)>;

/// exp(s H) v by restarted Lanczos with full reorthogonalization. The time
/// fraction is subdivided until the a-posteriori error estimate of each
/// substep is below tol (relative, per unit fraction).
ComplexVector krylov_expv(const LinearMap& apply, double norm_bound, const ComplexVector& v, cplx s,
                          const PropagatorOptions& opts = {});

/// exp(s G) as a dense matrix via Hermitian eigendecomposition.
ComplexMatrix dense_exponential(const SpinHamiltonian& g, cplx s);

/// exp(-i G dt) psi, normalized.
StateVector propagate(const StateVector& psi, const SpinHamiltonian& g, double dt, double tol = 1e-12);
StateVector propagate(const StateVector& psi, const SpinHamiltonian& g, double dt, const PropagatorOptions& opts);

/// exp(-tau H) psi (not normalized); used for imaginary-time evolution.
ComplexVector imaginary_time_evolve(const CompiledOperator& h, const ComplexVector& v, double tau,
                                    const PropagatorOptions& opts = {});

/// exp(-i G dt) prepared once and applied many times.
class GeneratorPropagator {
 public:
  GeneratorPropagator(const SpinHamiltonian& g, double dt, const PropagatorOptions& opts = {});

  StateVector apply(const StateVector& psi) const;
  bool uses_dense() const { return dense_; }
  double dt() const { return dt_; }

 private:
  int n_sites_;
  double dt_;
  PropagatorOptions opts_;
  bool identity_ = false;
  bool dense_ = false;
  ComplexMatrix unitary_;
  CompiledOperator op_;
};

}  // namespace qprep::pauli
