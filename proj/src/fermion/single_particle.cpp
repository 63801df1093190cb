#include "qprep/fermion/single_particle.hpp"

#include <cmath>

#include "qprep/core/error.hpp"

namespace qprep::fermion {

std::string to_string(BoundarySector s) { return s == BoundarySector::Periodic ? "periodic" : "antiperiodic"; }

bool SingleParticleOperator::is_zero(double tol) const {
  return scalar_offset == 0.0 && (matrix.size() == 0 || matrix.cwiseAbs().maxCoeff() <= tol);
}

namespace {

void require_even_size(int n_sites, const char* who) {
  QPREP_REQUIRE(n_sites >= 4 && n_sites % 2 == 0, std::string(who) + ": L must be even and at least 4");
}

double boundary_sign(BoundarySector s) { return s == BoundarySector::Antiperiodic ? -1.0 : 1.0; }

/// Adds c a^dagger_l a_{l+r} (with ring wrap and sector sign) to m.
void add_hop(ComplexMatrix& m, int l, int r, cplx c, BoundarySector sector) {
  const int n = static_cast<int>(m.rows());
  const int target = l + r;
  if (target >= n) {
    m(l, target - n) += c * boundary_sign(sector);
  } else {
    m(l, target) += c;
  }
}

}  // namespace

RealVector momenta(int n_sites, BoundarySector sector) {
  QPREP_REQUIRE(n_sites >= 1, "momenta: L must be positive");
  RealVector k(n_sites);
  const double shift = sector == BoundarySector::Antiperiodic ? 1.0 : 0.0;
  for (int m = 0; m < n_sites; ++m) k[m] = kPi * (2.0 * m + shift) / n_sites;
  return k;
}

SingleParticleOperator tb_matrix(int n_sites, double J, double h, BoundarySector sector) {
  require_even_size(n_sites, "tb_matrix");
  ComplexMatrix hop = ComplexMatrix::Zero(n_sites, n_sites);
  for (int l = 0; l < n_sites; ++l) add_hop(hop, l, 1, -J, sector);
  SingleParticleOperator op{hop + hop.adjoint(), h * n_sites};
  op.matrix.diagonal().array() += -2.0 * h;
  return op;
}

SingleParticleOperator liom_matrix(int n_sites, int n, int sign, BoundarySector sector, double J) {
  require_even_size(n_sites, "liom_matrix");
  QPREP_REQUIRE(sign == 1 || sign == -1, "liom_matrix: sign must be +1 or -1");
  QPREP_REQUIRE(n >= 0 && n <= n_sites / 2, "liom_matrix: n must lie in [0, L/2]");
  QPREP_REQUIRE(sign == 1 || n >= 1, "liom_matrix: I_n^- requires n >= 1");
  ComplexMatrix m = ComplexMatrix::Zero(n_sites, n_sites);
  const cplx c = sign == 1 ? cplx{-J, 0.0} : cplx{0.0, J};
  for (int l = 0; l < n_sites; ++l) add_hop(m, l, n, c, sector);
  return {m + m.adjoint(), 0.0};
}

double liom_symbol(int n, int sign, double k, double J) {
  return sign == 1 ? -2.0 * J * std::cos(n * k) : -2.0 * J * std::sin(n * k);
}

SingleParticleOperator number_operator(int n_sites) {
  return {ComplexMatrix::Identity(n_sites, n_sites), 0.0};
}

SingleParticleOperator density_modulation(int n_sites, const std::vector<double>& weights) {
  QPREP_REQUIRE(static_cast<int>(weights.size()) == n_sites, "density_modulation: one weight per site");
  SingleParticleOperator op{ComplexMatrix::Zero(n_sites, n_sites), 0.0};
  for (int l = 0; l < n_sites; ++l) op.matrix(l, l) = weights[static_cast<std::size_t>(l)];
  return op;
}

SingleParticleOperator hopping_modulation(int n_sites, int j, const std::vector<double>& weights,
                                          BoundarySector sector) {
  QPREP_REQUIRE(static_cast<int>(weights.size()) == n_sites, "hopping_modulation: one weight per bond");
  QPREP_REQUIRE(j >= 1 && j < n_sites, "hopping_modulation: range out of bounds");
  ComplexMatrix m = ComplexMatrix::Zero(n_sites, n_sites);
  for (int l = 0; l < n_sites; ++l) add_hop(m, l, j, weights[static_cast<std::size_t>(l)], sector);
  return {m + m.adjoint(), 0.0};
}

namespace {

std::vector<double> trig_profile(int n_sites, int m, bool use_sin) {
  std::vector<double> w(static_cast<std::size_t>(n_sites));
  for (int l = 1; l <= n_sites; ++l) {
    const double arg = m * kPi * l / n_sites;
    w[static_cast<std::size_t>(l - 1)] = use_sin ? std::sin(arg) : std::cos(arg);
  }
  return w;
}

}  // namespace

SingleParticleOperator build_generator_xx(int index, int n_sites, double J, double h, BoundarySector sector) {
  require_even_size(n_sites, "build_generator_xx");
  QPREP_REQUIRE(index >= 0 && index < kXxGeneratorCount, "build_generator_xx: index must be in [0,15)");
  if (index == 0) return tb_matrix(n_sites, J, h, sector);
  const int ms[3] = {2, 4, n_sites};
  const int hops[4][2] = {{1, 2}, {2, 2}, {1, n_sites}, {2, n_sites}};
  if (index <= 6) {
    const bool use_sin = index >= 4;
    return density_modulation(n_sites, trig_profile(n_sites, ms[(index - 1) % 3], use_sin));
  }
  const bool use_sin = index >= 11;
  const int* jn = hops[(index - 7) % 4];
  return hopping_modulation(n_sites, jn[0], trig_profile(n_sites, jn[1], use_sin), sector);
}

std::string xx_generator_name(int index) {
  static const char* names[] = {"H_XX",
                                "sum n_l cos(2 pi l/L)",
                                "sum n_l cos(4 pi l/L)",
                                "sum n_l cos(pi l)",
                                "sum n_l sin(2 pi l/L)",
                                "sum n_l sin(4 pi l/L)",
                                "sum n_l sin(pi l)",
                                "hop1 cos(2 pi l/L)",
                                "hop2 cos(2 pi l/L)",
                                "hop1 cos(pi l)",
                                "hop2 cos(pi l)",
                                "hop1 sin(2 pi l/L)",
                                "hop2 sin(2 pi l/L)",
                                "hop1 sin(pi l)",
                                "hop2 sin(pi l)"};
  QPREP_REQUIRE(index >= 0 && index < kXxGeneratorCount, "xx_generator_name: index out of range");
  return names[index];
}

double commutator_norm(const SingleParticleOperator& a, const SingleParticleOperator& b) {
  QPREP_REQUIRE(a.size() == b.size(), "commutator_norm: size mismatch");
  return (a.matrix * b.matrix - b.matrix * a.matrix).norm();
}

}  // namespace qprep::fermion
