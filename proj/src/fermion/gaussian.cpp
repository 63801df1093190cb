#include "qprep/fermion/gaussian.hpp"

#include <cmath>
#include <complex>

#include "qprep/core/error.hpp"

namespace qprep::fermion {

cplx pfaffian(ComplexMatrix a) {
  QPREP_REQUIRE(a.rows() == a.cols(), "pfaffian: matrix must be square");
  const Eigen::Index n = a.rows();
  if (n == 0) return 1.0;
  if (n % 2 == 1) return 0.0;
  cplx pf = 1.0;
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index kp;
    a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&kp);
    kp += k + 1;
    if (kp != k + 1) {
      a.row(k + 1).swap(a.row(kp));
      a.col(k + 1).swap(a.col(kp));
      pf = -pf;
    }
    if (a(k + 1, k) == cplx{0.0, 0.0}) return 0.0;
    pf *= a(k, k + 1);
    if (k + 2 < n) {
      const Eigen::Index rest = n - k - 2;
      const ComplexVector tau = a.row(k).tail(rest).transpose() / a(k, k + 1);
      const ComplexVector col = a.col(k + 1).tail(rest);
      a.bottomRightCorner(rest, rest) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

namespace {

using LongMatrix = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

void check_spectrum(const ComplexMatrix& c, double tol) {
  if (c.rows() == 0) return;
  validate_correlation(c, tol);
}

long double real_det(const LongMatrix& m, const char* who) {
  if (m.rows() == 0) return 1.0L;
  const std::complex<long double> d = m.partialPivLu().determinant();
  if (std::abs(d.imag()) > 1e-10L * std::max<long double>(1.0L, std::abs(d.real()))) {
    throw NumericalError(std::string(who) + ": determinant has a non-negligible imaginary part");
  }
  return d.real();
}

long double purity_ld(const ComplexMatrix& c, double tol) {
  check_spectrum(c, tol);
  const LongMatrix cl = c.cast<std::complex<long double>>();
  const LongMatrix id = LongMatrix::Identity(c.rows(), c.cols());
  return real_det(cl * cl + (id - cl) * (id - cl), "gaussian_purity");
}

long double cross_ld(const ComplexMatrix& c, const ComplexMatrix& c_prime, double tol) {
  QPREP_REQUIRE(c.rows() == c_prime.rows() && c.cols() == c_prime.cols(), "gaussian_cross: size mismatch");
  check_spectrum(c, tol);
  check_spectrum(c_prime, tol);
  const LongMatrix a = c.cast<std::complex<long double>>();
  const LongMatrix b = c_prime.cast<std::complex<long double>>();
  const LongMatrix id = LongMatrix::Identity(c.rows(), c.cols());
  return real_det(a * b + (id - a) * (id - b), "gaussian_cross");
}

}  // namespace

double gaussian_purity(const ComplexMatrix& c, double tol) { return static_cast<double>(purity_ld(c, tol)); }

double gaussian_cross(const ComplexMatrix& c, const ComplexMatrix& c_prime, double tol) {
  return static_cast<double>(cross_ld(c, c_prime, tol));
}

// the subtraction stays in extended precision: near-identical states would
// otherwise hit a double-rounding floor of about 1e-16 in the squared norm
double gaussian_frobenius_sq(const ComplexMatrix& c, const ComplexMatrix& c_prime, double tol) {
  const long double v = purity_ld(c, tol) + purity_ld(c_prime, tol) - 2.0L * cross_ld(c, c_prime, tol);
  return static_cast<double>(std::max(0.0L, v));
}

cplx string_correlator(const ComplexMatrix& c, int p, int q) {
  QPREP_REQUIRE(p >= 0 && p < q && q < c.rows(), "string_correlator: need 0 <= p < q < L");
  if (q == p + 1) return c(p, q);
  // operators in order: a^dagger_p, (A_m, B_m) for p < m < q, a_q with
  // A = a^dagger + a, B = a^dagger - a, so that A_m B_m = 1 - 2 n_m
  const int inner = q - p - 1;
  const Eigen::Index n = 2 * inner + 2;
  enum Kind { Cdag, A, B, Ann };
  std::vector<Kind> kind(static_cast<std::size_t>(n));
  std::vector<int> site(static_cast<std::size_t>(n));
  kind[0] = Cdag;
  site[0] = p;
  for (int m = 0; m < inner; ++m) {
    kind[static_cast<std::size_t>(1 + 2 * m)] = A;
    kind[static_cast<std::size_t>(2 + 2 * m)] = B;
    site[static_cast<std::size_t>(1 + 2 * m)] = site[static_cast<std::size_t>(2 + 2 * m)] = p + 1 + m;
  }
  kind[static_cast<std::size_t>(n - 1)] = Ann;
  site[static_cast<std::size_t>(n - 1)] = q;

  // <X_i X_j> for i before j
  auto contract = [&](Eigen::Index x, Eigen::Index y) -> cplx {
    const Kind kx = kind[static_cast<std::size_t>(x)], ky = kind[static_cast<std::size_t>(y)];
    const int i = site[static_cast<std::size_t>(x)], j = site[static_cast<std::size_t>(y)];
    const double delta = i == j ? 1.0 : 0.0;
    const cplx cij = c(i, j), cji = c(j, i);
    if (kx == Cdag) {
      if (ky == A) return cij;
      if (ky == B) return -cij;
      return cij;  // a^dagger_p a_q
    }
    if (ky == Ann) return cij;  // A_m a_q and B_m a_q
    if (kx == A && ky == A) return cij + delta - cji;
    if (kx == A && ky == B) return -cij + delta - cji;
    if (kx == B && ky == A) return cij - delta + cji;
    return -cij - delta + cji;
  };
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = x + 1; y < n; ++y) {
      m(x, y) = contract(x, y);
      m(y, x) = -m(x, y);
    }
  }
  return pfaffian(std::move(m));
}

double gamma_correlation(const CorrelationMatrix& c, int n) {
  const int len = c.size();
  QPREP_REQUIRE(n >= 1 && n < len, "gamma_correlation: n must lie in [1, L)");
  double acc = 0.0;
  for (int l = 0; l < len; ++l) {
    const int r = (l + n) % len;
    acc += 2.0 * string_correlator(c.c, std::min(l, r), std::max(l, r)).real();
  }
  return acc / len;
}

}  // namespace qprep::fermion
