#include <doctest.h>

#include <random>

#include "qprep/core/error.hpp"
#include "qprep/fermion/gaussian.hpp"
#include "qprep/fermion/gge.hpp"
#include "qprep/oracle/dense_spin.hpp"
#include "qprep/oracle/fock.hpp"
#include "qprep/pauli/pauli_string.hpp"

using namespace qprep;
using namespace qprep::fermion;

namespace {

constexpr auto kAnti = BoundarySector::Antiperiodic;
constexpr auto kPer = BoundarySector::Periodic;

RealVector eigenvalues(const ComplexMatrix& m) {
  return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

/// A generic Gaussian pure state: ground state scrambled by random generators.
CorrelationMatrix scrambled_state(int n, int n_particles, std::uint64_t seed, int steps = 30) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, kXxGeneratorCount - 1);
  CorrelationMatrix c = ground_state_correlation(tb_matrix(n, 1.0, 2.0, kAnti), n_particles);
  for (int s = 0; s < steps; ++s) c = evolve_correlation(c, build_generator_xx(pick(rng), n, 1.0, 2.0, kAnti), 0.2);
  return c;
}

}  // namespace

TEST_CASE("tight-binding matrix") {
  const auto t4 = tb_matrix(4, 1.0, 2.0, kAnti);
  CHECK(t4.scalar_offset == doctest::Approx(8.0));
  const RealVector e = eigenvalues(t4.matrix);
  CHECK(e[0] == doctest::Approx(-4 - std::sqrt(2.0)));
  CHECK(e[1] == doctest::Approx(-4 - std::sqrt(2.0)));
  CHECK(e[2] == doctest::Approx(-4 + std::sqrt(2.0)));
  CHECK(e[3] == doctest::Approx(-4 + std::sqrt(2.0)));
  CHECK(t4.matrix(3, 0).real() == doctest::Approx(1.0));
  CHECK(tb_matrix(4, 1.0, 2.0, kPer).matrix(3, 0).real() == doctest::Approx(-1.0));
  CHECK(eigenvalues(tb_matrix(6, 1.0, 2.0, kPer).matrix)[0] == doctest::Approx(-6.0));
  CHECK_THROWS_AS(tb_matrix(5, 1.0, 2.0, kAnti), InvalidArgument);
  CHECK_THROWS_AS(tb_matrix(2, 1.0, 2.0, kAnti), InvalidArgument);

  SUBCASE("matches the spin-chain XX model through Jordan-Wigner") {
    const int n = 8;
    const ComplexMatrix spin = oracle::kron_hamiltonian(pauli::build_xx(n, 1.0, 2.0));
    const ComplexMatrix even = oracle::even_parity_projector(n);
    const ComplexMatrix odd = ComplexMatrix::Identity(256, 256) - even;
    const ComplexMatrix fa = oracle::fock_quadratic(tb_matrix(n, 1.0, 2.0, kAnti));
    const ComplexMatrix fp = oracle::fock_quadratic(tb_matrix(n, 1.0, 2.0, kPer));
    CHECK(((fa - spin) * even).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(((fp - spin) * odd).cwiseAbs().maxCoeff() < 1e-12);
    // single-particle levels: momentum formula
    const RealVector k = momenta(n, kAnti);
    RealVector expected(n);
    for (int m = 0; m < n; ++m) expected[m] = -2.0 * (std::cos(k[m]) + 2.0);
    std::sort(expected.data(), expected.data() + n);
    CHECK((eigenvalues(tb_matrix(n, 1.0, 2.0, kAnti).matrix) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("local integrals of motion") {
  const int n = 12;
  CHECK(liom_matrix(n, 0, 1, kAnti).matrix.isApprox(-2.0 * ComplexMatrix::Identity(n, n)));
  const auto tb = tb_matrix(n, 1.0, 2.0, kAnti);
  ComplexMatrix hop = tb.matrix;
  hop.diagonal().setZero();
  CHECK((liom_matrix(n, 1, 1, kAnti).matrix - hop).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(liom_matrix(n, n / 2, 1, kAnti).is_zero(1e-15));
  CHECK(!liom_matrix(n, n / 2, -1, kAnti).is_zero(1e-15));
  CHECK_THROWS_AS(liom_matrix(n, 0, -1, kAnti), InvalidArgument);
  CHECK_THROWS_AS(liom_matrix(n, 7, 1, kAnti), InvalidArgument);

  std::vector<SingleParticleOperator> all{tb};
  for (int m = 0; m <= n / 2; ++m) {
    all.push_back(liom_matrix(n, m, 1, kAnti));
    if (m >= 1) all.push_back(liom_matrix(n, m, -1, kAnti));
  }
  double worst = 0.0;
  for (const auto& a : all) {
    for (const auto& b : all) worst = std::max(worst, commutator_norm(a, b));
  }
  CHECK(worst < 1e-12);

  // momentum symbols: the plane wave of momentum k is an eigenvector
  const RealVector k = momenta(n, kAnti);
  for (int m = 1; m <= n / 2; ++m) {
    for (int sign : {1, -1}) {
      const ComplexMatrix op = liom_matrix(n, m, sign, kAnti).matrix;
      for (int q = 0; q < n; ++q) {
        ComplexVector wave(n);
        for (int l = 0; l < n; ++l) wave[l] = std::exp(cplx{0.0, -k[q] * l});
        // a^dagger_k = sum_l e^{ikl} a^dagger_l, so m^T acts on the conjugate wave
        CHECK((op.transpose() * wave - liom_symbol(m, sign, k[q]) * wave).norm() < 1e-10);
      }
    }
  }
}

TEST_CASE("control generators") {
  const int n = 8;
  const auto number = number_operator(n);
  for (int g = 0; g < kXxGeneratorCount; ++g) {
    const auto op = build_generator_xx(g, n, 1.0, 2.0, kAnti);
    CHECK((op.matrix - op.matrix.adjoint()).norm() < 1e-14);
    CHECK(commutator_norm(op, number) < 1e-14);
  }
  // sin(pi l) vanishes on integer sites
  CHECK(build_generator_xx(6, n, 1.0, 2.0, kAnti).is_zero(1e-12));
  CHECK(build_generator_xx(13, n, 1.0, 2.0, kAnti).is_zero(1e-12));
  CHECK(build_generator_xx(14, n, 1.0, 2.0, kAnti).is_zero(1e-12));
  const auto stagger = build_generator_xx(3, n, 1.0, 2.0, kAnti);
  CHECK(stagger.matrix(0, 0).real() == doctest::Approx(-1.0));
  CHECK(stagger.matrix(1, 1).real() == doctest::Approx(1.0));
  const auto hop = build_generator_xx(8, n, 1.0, 2.0, kAnti);
  CHECK(hop.matrix(0, 2).real() == doctest::Approx(std::cos(2 * kPi / n)));
  CHECK(hop.matrix(7, 1).real() == doctest::Approx(-std::cos(2 * kPi * 8 / n)));
  CHECK_THROWS_AS(build_generator_xx(15, n, 1.0, 2.0, kAnti), InvalidArgument);
}

TEST_CASE("ground-state correlation matrices") {
  const auto tb = tb_matrix(8, 1.0, 2.0, kAnti);
  CHECK(ground_state_correlation(tb, 0).c.norm() == 0.0);
  CHECK((ground_state_correlation(tb, 8).c - ComplexMatrix::Identity(8, 8)).norm() < 1e-12);
  const auto c4 = ground_state_correlation(tb, 4);
  CHECK((c4.c * c4.c - c4.c).norm() < 1e-12);
  CHECK(c4.particle_number() == doctest::Approx(4.0));
  CHECK(observable_expectation(c4, tb) == doctest::Approx(-5.226251859506).epsilon(1e-12));
  CHECK(observable_expectation(c4, number_operator(8)) == doctest::Approx(4.0));

  const ComplexVector psi = oracle::slater_ground_state(tb, 4);
  CHECK((oracle::fock_correlation(psi) - c4.c).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(ground_state_correlation(tb_matrix(8, 1.0, 2.0, kPer), 2), DegeneracyError);
  CHECK_THROWS_AS(ground_state_correlation(tb, 9), InvalidArgument);
}

TEST_CASE("observables on correlation matrices") {
  const auto c = scrambled_state(8, 4, 17);
  for (int m = 1; m <= 4; ++m) {
    const auto op = liom_matrix(8, m, 1, kAnti);
    const double v = observable_expectation(c, op);
    CHECK(std::isfinite(v));
  }
  // imaginary antisymmetric coefficients vanish on a real symmetric C
  const auto real_state = ground_state_correlation(tb_matrix(8, 1.0, 2.0, kAnti), 4);
  CHECK(real_state.c.imag().norm() < 1e-12);
  for (int m = 1; m <= 4; ++m) CHECK(std::abs(observable_expectation(real_state, liom_matrix(8, m, -1, kAnti))) < 1e-12);

  SUBCASE("quadratic variance matches the Fock-space oracle") {
    const std::vector<SingleParticleOperator> ops = {liom_matrix(6, 2, 1, kAnti), build_generator_xx(9, 6, 1, 2, kAnti),
                                                     tb_matrix(6, 1.0, 2.0, kAnti)};
    const auto cs = scrambled_state(6, 2, 3);
    // rebuild the pure state by evolving the Fock ground state with the same protocol
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> pick(0, kXxGeneratorCount - 1);
    ComplexVector psi = oracle::slater_ground_state(tb_matrix(6, 1.0, 2.0, kAnti), 2);
    for (int s = 0; s < 30; ++s) {
      psi = oracle::dense_unitary(oracle::fock_quadratic(build_generator_xx(pick(rng), 6, 1.0, 2.0, kAnti)), 0.2) * psi;
    }
    CHECK((oracle::fock_correlation(psi) - cs.c).cwiseAbs().maxCoeff() < 1e-10);
    for (const auto& op : ops) {
      const ComplexMatrix big = oracle::fock_quadratic(op);
      const double mean = psi.dot(big * psi).real();
      const double var = (big * psi).squaredNorm() - mean * mean;
      CHECK(std::abs(observable_expectation(cs, op) - mean) < 1e-10);
      CHECK(std::abs(quadratic_variance(cs, op) - var) < 1e-9);
    }
  }
}

TEST_CASE("block correlation") {
  const auto c = scrambled_state(8, 4, 2);
  CHECK(block_correlation(c, 0, 8) == c.c);
  CHECK(block_correlation(c, 3, 1)(0, 0) == c.c(3, 3));
  CHECK(block_correlation(c, 2, 4).block(1, 1, 2, 2) == block_correlation(c, 3, 2));
  CHECK_THROWS_AS(block_correlation(c, 6, 3), InvalidArgument);
}

TEST_CASE("correlation evolution") {
  const auto c = scrambled_state(8, 4, 5);
  const auto g = build_generator_xx(2, 8, 1.0, 2.0, kAnti);
  const auto out = evolve_correlation(c, g, 0.7);
  CHECK((out.c.diagonal() - c.c.diagonal()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(evolve_correlation(c, tb_matrix(8, 1.0, 2.0, kAnti), 0.0).c == c.c);

  SUBCASE("LIOMs are conserved under the model Hamiltonian") {
    auto cur = c;
    const auto tb = tb_matrix(8, 1.0, 2.0, kAnti);
    std::vector<double> start;
    for (int m = 0; m <= 4; ++m) start.push_back(observable_expectation(cur, liom_matrix(8, m, 1, kAnti)));
    for (int s = 0; s < 20; ++s) {
      cur = evolve_correlation(cur, tb, 0.2);
      for (int m = 0; m <= 4; ++m) {
        CHECK(std::abs(observable_expectation(cur, liom_matrix(8, m, 1, kAnti)) - start[static_cast<std::size_t>(m)]) <
              1e-9);
      }
    }
  }
  SUBCASE("particle number and spectrum under long random protocols") {
    const int n = 16;
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> pick(0, kXxGeneratorCount - 1);
    std::vector<ComplexMatrix> u;
    for (int g2 = 0; g2 < kXxGeneratorCount; ++g2) u.push_back(single_particle_unitary(build_generator_xx(g2, n, 1.0, 2.0, kAnti), 0.2));
    auto cur = ground_state_correlation(tb_matrix(n, 1.0, 2.0, kAnti), 8);
    double worst_trace = 0.0;
    for (int s = 0; s < 10000; ++s) {
      const double before = cur.particle_number();
      cur = evolve_correlation(cur, u[static_cast<std::size_t>(pick(rng))]);
      worst_trace = std::max(worst_trace, std::abs(cur.particle_number() - before));
    }
    CHECK(worst_trace < 1e-10);
    const RealVector e = eigenvalues(cur.c);
    CHECK(e.minCoeff() > -1e-7);
    CHECK(e.maxCoeff() < 1 + 1e-7);
  }
}

TEST_CASE("GGE occupations") {
  const auto zero = GgeSpec::zero(8);
  CHECK((gge_occupations(zero).array() - 0.5).abs().maxCoeff() == 0.0);
  CHECK((gge_correlation_matrix(zero).c - 0.5 * ComplexMatrix::Identity(8, 8)).norm() < 1e-14);

  const auto gibbs = GgeSpec::gibbs(12, 0.4, 1.0, 2.0);
  CHECK(gibbs.plus[0] == doctest::Approx(0.8));
  CHECK(gibbs.plus[1] == doctest::Approx(0.4));
  const RealVector occ = gge_occupations(gibbs);
  const RealVector k = momenta(12, kAnti);
  for (int m = 0; m < 12; ++m) {
    const double eps = -2.0 * (std::cos(k[m]) + 2.0);
    CHECK(occ[m] == doctest::Approx(1.0 / (1.0 + std::exp(0.4 * eps))).epsilon(1e-14));
  }
  // the k = pi value from the scalar closed form
  const double theta = 0.8 * liom_symbol(0, 1, kPi) + 0.4 * liom_symbol(1, 1, kPi);
  CHECK(1.0 / (1.0 + std::exp(theta)) == doctest::Approx(0.689974481128).epsilon(1e-12));

  // Gibbs-as-GGE: same correlation matrix as the thermal state of tb_matrix
  const auto thermal = thermal_correlation(tb_matrix(12, 1.0, 2.0, kAnti), 0.4);
  CHECK((gge_correlation_matrix(gibbs).c - thermal.c).cwiseAbs().maxCoeff() < 1e-12);
  const ComplexVector diag = gge_correlation_matrix(gibbs).c.diagonal();
  CHECK((diag.array() - occ.mean()).abs().maxCoeff() < 1e-12);

  GgeSpec huge = GgeSpec::zero(8);
  huge.plus[0] = 1e6;
  const RealVector clamped = gge_occupations(huge);
  CHECK(clamped.allFinite());
}

TEST_CASE("GGE correlation matrix against the Fock-space density") {
  GgeSpec spec = GgeSpec::gibbs(8, 0.4, 1.0, 2.0);
  spec.plus[2] = 0.15;
  spec.minus[1] = -0.1;
  spec.minus[3] = 0.05;
  ComplexMatrix h = ComplexMatrix::Zero(8, 8);
  for (int n = 0; n <= 4; ++n) {
    h += spec.plus[static_cast<std::size_t>(n)] * liom_matrix(8, n, 1, kAnti).matrix;
    if (n >= 1) h += spec.minus[static_cast<std::size_t>(n)] * liom_matrix(8, n, -1, kAnti).matrix;
  }
  const ComplexMatrix rho = oracle::fock_gaussian_density(h);
  CHECK((oracle::fock_correlation(rho) - gge_correlation_matrix(spec).c).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("GGE multiplier solver") {
  SUBCASE("Gibbs targets recover the Gibbs multipliers") {
    const auto t = deformed_gibbs_targets(12, 0.4, 0.0, 1.0, 2.0);
    SolverReport rep;
    const auto spec = solve_gge_multipliers(t, {}, &rep);
    CHECK(spec.plus[0] == doctest::Approx(0.8).epsilon(1e-8));
    CHECK(spec.plus[1] == doctest::Approx(0.4).epsilon(1e-8));
    for (std::size_t n = 2; n < spec.plus.size(); ++n) CHECK(std::abs(spec.plus[n]) < 1e-8);
    for (double m : spec.minus) CHECK(std::abs(m) < 1e-8);
    CHECK(rep.iterations < 20);
  }
  SUBCASE("deformed Gibbs targets round-trip where feasible") {
    for (int n : {8, 10}) {
      const auto t = deformed_gibbs_targets(n, 0.4, 0.05, 1.0, 2.0);
      const auto spec = solve_gge_multipliers(t);
      for (const auto& [key, value] : t.expectations) CHECK(std::abs(gge_moment(spec, key) - value) < 1e-9 * n);
    }
    for (int n : {60, 120}) {
      const auto t = deformed_gibbs_targets(n, 0.4, 0.05, 1.0, 2.0, 4);
      const auto spec = solve_gge_multipliers(t);
      for (const auto& [key, value] : t.expectations) CHECK(std::abs(gge_moment(spec, key) - value) < 1e-9 * n);
    }
  }
  SUBCASE("infeasible targets name the offending mode") {
    const auto t = deformed_gibbs_targets(60, 0.4, 0.05, 1.0, 2.0);
    CHECK_THROWS_AS(solve_gge_multipliers(t), InfeasibleError);
    try {
      solve_gge_multipliers(t);
    } catch (const InfeasibleError& e) {
      CHECK(std::string(e.what()).find("momentum mode") != std::string::npos);
    }
    GgeTarget bad = deformed_gibbs_targets(8, 0.4, 0.0, 1.0, 2.0);
    bad.expectations[{4, 1}] = 0.5;
    CHECK_THROWS_AS(solve_gge_multipliers(bad), InfeasibleError);
  }
}

TEST_CASE("deformed Gibbs targets") {
  const auto t = deformed_gibbs_targets(60, 0.4, 0.05, 1.0, 2.0);
  const auto gibbs = GgeSpec::gibbs(60, 0.4, 1.0, 2.0);
  CHECK(t.expectations.at({2, 1}) - gge_moment(gibbs, {2, 1}) == doctest::Approx(3.0));
  CHECK(t.expectations.at({1, 1}) == doctest::Approx(gge_moment(gibbs, {1, 1})));
  CHECK(t.expectations.at({30, 1}) == 0.0);
  for (int n = 1; n <= 30; ++n) CHECK(std::abs(t.expectations.at({n, -1})) < 1e-12);
  const auto capped = deformed_gibbs_targets(60, 0.4, 0.05, 1.0, 2.0, 4);
  CHECK(capped.expectations.at({5, 1}) == doctest::Approx(gge_moment(gibbs, {5, 1})));
  CHECK(capped.expectations.at({4, 1}) - gge_moment(gibbs, {4, 1}) == doctest::Approx(3.0));
  CHECK_THROWS_AS(deformed_gibbs_targets(61, 0.4, 0.05, 1.0, 2.0), InvalidArgument);
}

TEST_CASE("Pfaffian") {
  ComplexMatrix a(4, 4);
  a << 0, 1, 2, 3, -1, 0, 4, 5, -2, -4, 0, 6, -3, -5, -6, 0;
  CHECK(std::abs(pfaffian(a) - cplx{1 * 6 - 2 * 5 + 3 * 4, 0}) < 1e-12);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int n : {2, 6, 10}) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = cplx{g(rng), g(rng)};
    m = (m - m.transpose()).eval();
    const cplx pf = pfaffian(m);
    CHECK(std::abs(pf * pf - m.determinant()) < 1e-9 * std::abs(m.determinant()));
  }
  CHECK(pfaffian(ComplexMatrix::Zero(3, 3)) == cplx{0.0, 0.0});
}

TEST_CASE("Gaussian purity and overlap") {
  const auto pure = ground_state_correlation(tb_matrix(8, 1.0, 2.0, kAnti), 4);
  CHECK(gaussian_purity(block_correlation(pure, 0, 8)) == doctest::Approx(1.0));
  CHECK(gaussian_purity(0.5 * ComplexMatrix::Identity(3, 3)) == doctest::Approx(0.125));
  CHECK_THROWS_AS(gaussian_purity(1.5 * ComplexMatrix::Identity(2, 2)), InvalidArgument);

  GgeSpec spec = GgeSpec::gibbs(6, 0.4, 1.0, 2.0);
  spec.plus[2] = 0.3;
  const auto cg = gge_correlation_matrix(spec);
  ComplexMatrix h = ComplexMatrix::Zero(6, 6);
  for (int n = 0; n <= 2; ++n) h += spec.plus[static_cast<std::size_t>(n)] * liom_matrix(6, n, 1, kAnti).matrix;
  const ComplexMatrix rho = oracle::fock_gaussian_density(h);
  const auto cs = scrambled_state(6, 2, 9);
  const ComplexMatrix rho2 = oracle::density_from_correlation(0.9 * cs.c + 0.05 * ComplexMatrix::Identity(6, 6));
  const ComplexMatrix c2 = oracle::fock_correlation(rho2);
  for (int la = 1; la <= 3; ++la) {
    for (int first = 0; first + la <= 6; ++first) {
      const ComplexMatrix ra = oracle::trace_out(rho, 6, first, la);
      const ComplexMatrix rb = oracle::trace_out(rho2, 6, first, la);
      const ComplexMatrix ca = block_correlation(cg, first, la);
      const ComplexMatrix cb = c2.block(first, first, la, la);
      CHECK(std::abs(gaussian_purity(ca) - (ra * ra).trace().real()) < 1e-10);
      CHECK(std::abs(gaussian_cross(ca, cb) - (ra * rb).trace().real()) < 1e-10);
      CHECK(std::abs(gaussian_cross(ca, cb) - gaussian_cross(cb, ca)) < 1e-12);
      CHECK(std::abs(gaussian_frobenius_sq(ca, cb) - (ra - rb).squaredNorm()) < 1e-10);
    }
  }
  // one site: ||rho - rho'||^2 = 2 (n - n')^2
  ComplexMatrix n1(1, 1), n2(1, 1);
  n1(0, 0) = 0.3;
  n2(0, 0) = 0.8;
  CHECK(gaussian_frobenius_sq(n1, n2) == doctest::Approx(2 * 0.25));
}

TEST_CASE("string correlator Gamma_n") {
  const int n = 8;
  CorrelationMatrix half{0.5 * ComplexMatrix::Identity(n, n), kAnti};
  for (int r = 1; r < n; ++r) CHECK(std::abs(gamma_correlation(half, r)) < 1e-14);

  const auto c = scrambled_state(n, 4, 21);
  CHECK(gamma_correlation(c, 1) == doctest::Approx(-observable_expectation(c, liom_matrix(n, 1, 1, kAnti)) / n));

  // rebuild the same pure state in the spin basis
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> pick(0, kXxGeneratorCount - 1);
  ComplexVector psi = oracle::slater_ground_state(tb_matrix(n, 1.0, 2.0, kAnti), 4);
  for (int s = 0; s < 30; ++s) {
    psi = oracle::dense_unitary(oracle::fock_quadratic(build_generator_xx(pick(rng), n, 1.0, 2.0, kAnti)), 0.2) * psi;
  }
  for (int r = 1; r < n; ++r) {
    const double dense = psi.dot(oracle::gamma_operator(n, r) * psi).real();
    CHECK(std::abs(gamma_correlation(c, r) - dense) < 1e-10);
  }
  CHECK_THROWS_AS(gamma_correlation(c, 0), InvalidArgument);
  CHECK_THROWS_AS(gamma_correlation(c, n), InvalidArgument);
}
