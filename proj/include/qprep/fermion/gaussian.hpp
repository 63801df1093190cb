#pragma once

#include "qprep/fermion/correlation.hpp"

namespace qprep::fermion {

/// Pfaffian of a complex skew-symmetric matrix (Parlett-Reid elimination with
/// partial pivoting). Odd sizes give 0.
cplx pfaffian(ComplexMatrix a);

/// Tr[rho_A^2] = det[C^2 + (1 - C)^2] for the Gaussian state of block C.
double gaussian_purity(const ComplexMatrix& c, double tol = 1e-9);

/// Tr[rho_A rho'_A] = det[C C' + (1 - C)(1 - C')].
double gaussian_cross(const ComplexMatrix& c, const ComplexMatrix& c_prime, double tol = 1e-9);

/// ||rho_A - rho'_A||_F^2 from the two determinant identities, clamped at 0.
double gaussian_frobenius_sq(const ComplexMatrix& c, const ComplexMatrix& c_prime, double tol = 1e-9);

/// Gamma_n = L^{-1} sum_l <sigma^+_l sigma^-_{l+n} + h.c.> on the periodic spin
/// ring, evaluated with Wick's theorem including the Jordan-Wigner string.
double gamma_correlation(const CorrelationMatrix& c, int n);

/// <a^dagger_p prod_{p<m<q} (1 - 2 n_m) a_q> for p < q, i.e. <sigma^+_p sigma^-_q>.
cplx string_correlator(const ComplexMatrix& c, int p, int q);

}  // namespace qprep::fermion
