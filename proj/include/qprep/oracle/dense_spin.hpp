#pragma once

#include "qprep/pauli/pauli_string.hpp"

namespace qprep::oracle {

// Reference constructions by explicit Kronecker products of 2x2 matrices in
// the (down, up) single-site basis. They do not share code with the
// matrix-free kernels they check.

enum class SiteOp { Identity, X, Y, Z, Plus, Minus };

ComplexMatrix site_matrix(SiteOp op);

/// Operator acting with ops[l] on site l (site 0 is the least-significant bit).
ComplexMatrix kron_chain(const std::vector<SiteOp>& ops);

ComplexMatrix kron_pauli(const pauli::PauliString& p, int n_sites);
ComplexMatrix kron_hamiltonian(const pauli::SpinHamiltonian& h);

/// sigma^+_i sigma^-_j on an L-site chain (i != j).
ComplexMatrix spin_hop(int n_sites, int i, int j);

/// L^{-1} sum_l (sigma^+_l sigma^-_{l+n} + h.c.) with periodic wrap.
ComplexMatrix gamma_operator(int n_sites, int n);

/// Partial trace by explicit index summation over the complement.
ComplexMatrix trace_out(const ComplexMatrix& rho, int n_sites, int first, int length);

}  // namespace qprep::oracle
