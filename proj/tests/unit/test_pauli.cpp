#include <doctest.h>

#include <random>

#include "qprep/core/error.hpp"
#include "qprep/oracle/dense_spin.hpp"
#include "qprep/oracle/fock.hpp"
#include "qprep/pauli/gibbs.hpp"
#include "qprep/pauli/krylov.hpp"
#include "qprep/pauli/reduced_density.hpp"
#include "qprep/pauli/shell.hpp"

using namespace qprep;
using namespace qprep::pauli;

namespace {

const IsingCouplings kIsing{1.0, 0.8090, 0.9045};

StateVector random_state(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return StateVector::haar_random(n, rng);
}

RealVector sorted_eigenvalues(const ComplexMatrix& m) {
  return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST_CASE("Pauli strings reject malformed input") {
  CHECK_THROWS_AS(PauliString(0.0, {{0, Axis::X}}), InvalidArgument);
  CHECK_THROWS_AS(PauliString(1.0, {{1, Axis::X}, {1, Axis::Z}}), InvalidArgument);
  PauliString p(2.0, {{3, Axis::Z}, {0, Axis::Y}});
  CHECK(p.factors()[0].site == 0);
  CHECK(p.flip_mask() == 1u);
  CHECK(p.sign_mask() == 9u);
  CHECK_THROWS_AS(build_ising(1, kIsing), InvalidArgument);
}

TEST_CASE("Ising Hamiltonian structure") {
  const auto h = build_ising(16, kIsing);
  CHECK(h.terms().size() == 48);
  CHECK(h.is_real());

  SUBCASE("two-site ring double counts the bond") {
    const auto h2 = build_ising(2, {1.0, 0.0, 0.0});
    const RealVector e = sorted_eigenvalues(h2.dense());
    CHECK(e[0] == doctest::Approx(-2.0));
    CHECK(e[1] == doctest::Approx(-2.0));
    CHECK(e[2] == doctest::Approx(2.0));
    CHECK(e[3] == doctest::Approx(2.0));
  }
  SUBCASE("spectrum matches the Kronecker-product oracle at L=8") {
    const auto h8 = build_ising(8, kIsing);
    const RealVector a = sorted_eigenvalues(h8.dense());
    const RealVector b = sorted_eigenvalues(oracle::kron_hamiltonian(h8));
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-11);
    // frozen from an independent numpy diagonalization
    CHECK(a[0] / 8 == doctest::Approx(-1.267117242353).epsilon(1e-11));
  }
}

TEST_CASE("Ising generators") {
  CHECK(build_generator_ising(0, 6, kIsing).dense().isApprox(build_ising(6, kIsing).dense()));
  CHECK_THROWS_AS(build_generator_ising(6, 6, kIsing), InvalidArgument);
  CHECK_THROWS_AS(build_generator_ising(-1, 6, kIsing), InvalidArgument);

  const RealVector e = sorted_eigenvalues(build_generator_ising(2, 4, kIsing).dense());
  const double g = kIsing.g;
  CHECK(e[0] == doctest::Approx(-4 * g));
  CHECK(e[15] == doctest::Approx(4 * g));
  CHECK(e[1] == doctest::Approx(-2 * g));
  CHECK(e[7] == doctest::Approx(0.0));

  const ComplexMatrix g4 = build_generator_ising(4, 8, kIsing).dense();
  for (int k = 0; k < 3; ++k) {
    const ComplexMatrix gk = build_generator_ising(k, 8, kIsing).dense();
    CHECK((g4 * gk - gk * g4).norm() > 1e-3);
  }
  for (int k = 0; k < kIsingGeneratorCount; ++k) {
    const ComplexMatrix m = build_generator_ising(k, 6, kIsing).dense();
    CHECK((m - m.adjoint()).norm() < 1e-14);
    CHECK(m.isApprox(oracle::kron_hamiltonian(build_generator_ising(k, 6, kIsing))));
  }
}

TEST_CASE("matrix-free application equals the dense oracle") {
  for (int n = 2; n <= 8; ++n) {
    const auto h = build_ising(n, kIsing) + build_generator_ising(4, n, kIsing) + build_generator_ising(3, n, kIsing);
    const ComplexMatrix dense = oracle::kron_hamiltonian(h);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const StateVector psi = random_state(n, 100 * n + trial);
      worst = std::max(worst, (apply_hamiltonian(h, psi) - dense * psi.amplitudes()).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-12);
  }
  const auto z = magnetization_density(4).scaled(4.0);
  const ComplexVector out = apply_hamiltonian(z, StateVector::all_down(4));
  CHECK(out[0].real() == doctest::Approx(-4.0));
  CHECK(out.tail(15).norm() == 0.0);
  CHECK(apply_hamiltonian(SpinHamiltonian(4), StateVector::all_down(4)).norm() == 0.0);
  CHECK_THROWS_AS(apply_hamiltonian(build_ising(5, kIsing), StateVector::all_down(4)), InvalidArgument);
}

TEST_CASE("expectation values and variances") {
  const auto psi0 = StateVector::all_down(8);
  CHECK(expectation(psi0, magnetization_density(8)) == doctest::Approx(-1.0));
  CHECK(expectation(psi0, build_ising(8, kIsing).scaled(1.0 / 8)) == doctest::Approx(0.1910).epsilon(1e-12));
  CHECK(variance(StateVector::all_down(4), build_generator_ising(2, 4, kIsing)) ==
        doctest::Approx(4 * kIsing.g * kIsing.g));
  CHECK(variance(psi0, magnetization_density(8)) == 0.0);

  const auto h = build_ising(8, kIsing);
  const ComplexMatrix dense = oracle::kron_hamiltonian(h);
  const StateVector psi = random_state(8, 5);
  const cplx ref = psi.amplitudes().dot(dense * psi.amplitudes());
  CHECK(std::abs(expectation(psi, h) - ref.real()) < 1e-12);
  const double ref2 = (dense * psi.amplitudes()).squaredNorm() - ref.real() * ref.real();
  CHECK(std::abs(variance(psi, h) - ref2) < 1e-11);
  CHECK_THROWS_AS(expectation(psi, build_ising(6, kIsing)), InvalidArgument);
}

TEST_CASE("propagation") {
  SUBCASE("diagonal generator gives exact phases") {
    const auto g = build_generator_ising(1, 4, kIsing);
    const StateVector psi = random_state(4, 9);
    const StateVector out = propagate(psi, g, 0.37);
    const ComplexMatrix d = g.dense();
    for (Eigen::Index b = 0; b < 16; ++b) {
      const cplx expected = psi.amplitudes()[b] * std::exp(cplx{0.0, -0.37 * d(b, b).real()});
      CHECK(std::abs(out.amplitudes()[b] - expected) < 1e-12);
    }
  }
  SUBCASE("zero step is the identity") {
    const StateVector psi = random_state(6, 1);
    CHECK(propagate(psi, build_ising(6, kIsing), 0.0).amplitudes() == psi.amplitudes());
  }
  SUBCASE("tolerance range is enforced") {
    const StateVector psi = random_state(6, 1);
    CHECK_THROWS_AS(propagate(psi, build_ising(6, kIsing), 0.1, 1e-3), InvalidArgument);
    CHECK_THROWS_AS(propagate(psi, build_ising(6, kIsing), 0.1, 0.0), InvalidArgument);
  }
  SUBCASE("Krylov agrees with the dense exponential for every generator") {
    PropagatorOptions krylov;
    krylov.method = PropagatorMethod::Krylov;
    const StateVector psi = random_state(6, 3);
    for (int k = 0; k < kIsingGeneratorCount; ++k) {
      const auto g = build_generator_ising(k, 6, kIsing);
      const ComplexVector ref = oracle::dense_unitary(oracle::kron_hamiltonian(g), 0.1) * psi.amplitudes();
      const StateVector out = GeneratorPropagator(g, 0.1, krylov).apply(psi);
      CHECK((out.amplitudes() - ref).norm() < 1e-11);
      CHECK(std::abs(out.norm() - 1.0) < 1e-12);
    }
  }
  SUBCASE("norm and energy are conserved along a long Krylov run") {
    PropagatorOptions krylov;
    krylov.method = PropagatorMethod::Krylov;
    const auto h = build_ising(10, kIsing);
    StateVector psi = random_state(10, 4);
    const double e0 = expectation(psi, h);
    const GeneratorPropagator u(h, 0.1, krylov);
    const GeneratorPropagator v(build_generator_ising(5, 10, kIsing), 0.1, krylov);
    for (int t = 0; t < 50; ++t) {
      psi = u.apply(psi);
      CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
    }
    CHECK(std::abs(expectation(psi, h) - e0) < 1e-10);
    psi = v.apply(psi);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
  }
  SUBCASE("large steps are subdivided") {
    PropagatorOptions krylov;
    krylov.method = PropagatorMethod::Krylov;
    krylov.max_krylov_dim = 8;
    const auto h = build_ising(8, kIsing);
    const StateVector psi = random_state(8, 8);
    const ComplexVector ref = oracle::dense_unitary(oracle::kron_hamiltonian(h), 3.0) * psi.amplitudes();
    CHECK((GeneratorPropagator(h, 3.0, krylov).apply(psi).amplitudes() - ref).norm() < 1e-10);
  }
}

TEST_CASE("reduced density matrices") {
  const StateVector down = StateVector::all_down(6);
  const ComplexMatrix r = reduced_density(down, {2, 3});
  CHECK(std::abs(r(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(r.trace() - 1.0) < 1e-14);
  CHECK(std::abs((r * r).trace() - 1.0) < 1e-14);

  const StateVector psi = random_state(6, 11);
  const ComplexMatrix full = reduced_density(psi, {0, 6});
  CHECK((full - psi.amplitudes() * psi.amplitudes().adjoint()).cwiseAbs().maxCoeff() < 1e-14);

  const ComplexMatrix rho = psi.amplitudes() * psi.amplitudes().adjoint();
  for (int first = 0; first <= 3; ++first) {
    const ComplexMatrix a = reduced_density(psi, {first, 3});
    CHECK((a - oracle::trace_out(rho, 6, first, 3)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a - a.adjoint()).norm() < 1e-14);
    CHECK(Eigen::SelfAdjointEigenSolver<ComplexMatrix>(a).eigenvalues().minCoeff() > -1e-10);
  }
  // nesting: a sub-block of a block equals the direct reduction
  const ComplexMatrix big = reduced_density(psi, {1, 4});
  CHECK((partial_trace(big, 4, {1, 2}) - reduced_density(psi, {2, 2})).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(reduced_density(psi, {4, 3}), InvalidArgument);
  CHECK_THROWS_AS(reduced_density(psi, {-1, 2}), InvalidArgument);
  CHECK_THROWS_AS(reduced_density(random_state(10, 1), {0, 9}), InvalidArgument);
}

TEST_CASE("Gibbs expectations, exact route") {
  const auto h = build_ising(8, kIsing);
  const std::vector<NamedObservable> obs = {{"energy", h.scaled(1.0 / 8)}, {"mag", magnetization_density(8)},
                                            {"sumz", magnetization_density(8).scaled(8.0)}};
  GibbsOptions exact;
  const auto inf = gibbs_expectations(h, 0.0, obs, exact);
  CHECK(std::abs(inf.expectations.at("sumz")) < 1e-12);

  const auto t = gibbs_expectations(h, 0.2, obs, exact);
  // frozen from an independent numpy diagonalization
  CHECK(t.expectations.at("energy") == doctest::Approx(-0.420462857269).epsilon(1e-10));
  CHECK(t.expectations.at("mag") == doctest::Approx(-0.107614413168).epsilon(1e-10));
  CHECK(t.stderrs.at("energy") == 0.0);
  CHECK(t.method == GibbsMethod::Exact);

  const auto cold = gibbs_expectations(h, 50.0, obs, exact);
  // the first gap is small at L=8, so beta=50 is close to but not at the ground state
  CHECK(cold.expectations.at("energy") == doctest::Approx(-1.267117242353).epsilon(1e-5));
  CHECK(cold.expectations.at("energy") < gibbs_expectations(h, 5.0, obs, exact).expectations.at("energy"));

  CHECK_THROWS_AS(gibbs_expectations(h, -1.0, obs, exact), InvalidArgument);
  GibbsOptions capped;
  capped.exact_cap = 6;
  CHECK_THROWS_AS(gibbs_expectations(h, 0.2, obs, capped), CapacityError);
}

TEST_CASE("Gibbs expectations, stochastic route") {
  const auto h = build_ising(8, kIsing);
  const std::vector<NamedObservable> obs = {{"energy", h.scaled(1.0 / 8)}, {"mag", magnetization_density(8)}};
  const auto exact = gibbs_expectations(h, 0.2, obs);
  GibbsOptions st;
  st.method = GibbsMethod::Stochastic;
  st.samples = 64;
  st.seed = 2024;
  const auto est = gibbs_expectations(h, 0.2, obs, st);
  CHECK(est.sample_count == 64);
  for (const auto& o : obs) {
    const double se = est.stderrs.at(o.name);
    CHECK(se > 0.0);
    CHECK(std::abs(est.expectations.at(o.name) - exact.expectations.at(o.name)) < 3.0 * se);
  }
  CHECK(!est.stderr_warning);
  st.stderr_tolerance = 1e-9;
  CHECK(gibbs_expectations(h, 0.2, obs, st).stderr_warning);

  SUBCASE("thread count does not change the estimate") {
    GibbsOptions st4 = st;
    st4.threads = 4;
    const auto a = gibbs_expectations(h, 0.2, obs, st);
    const auto b = gibbs_expectations(h, 0.2, obs, st4);
    CHECK(a.expectations.at("energy") == b.expectations.at("energy"));
  }
}

TEST_CASE("Gibbs reduced density") {
  const auto h = build_ising(8, kIsing);
  const ComplexMatrix inf = gibbs_reduced_density(h, 0.0, {2, 3});
  CHECK((inf - ComplexMatrix::Identity(8, 8) / 8.0).cwiseAbs().maxCoeff() < 1e-12);

  const ComplexMatrix one = gibbs_reduced_density(h, 0.2, {3, 1});
  const auto t = gibbs_expectations(h, 0.2, {{"mag", magnetization_density(8)}});
  const double mz = t.expectations.at("mag");
  CHECK(std::abs(one(1, 1).real() - 0.5 * (1 + mz)) < 1e-12);
  CHECK(std::abs(one(0, 0).real() - 0.5 * (1 - mz)) < 1e-12);

  const auto h4 = build_ising(4, kIsing);
  const ComplexMatrix whole = gibbs_reduced_density(h4, 0.3, {0, 4});
  const ComplexMatrix ref = [&] {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(oracle::kron_hamiltonian(h4));
    RealVector w = (-0.3 * eig.eigenvalues().array()).exp().matrix();
    w /= w.sum();
    return ComplexMatrix(eig.eigenvectors() * w.cast<cplx>().asDiagonal() * eig.eigenvectors().adjoint());
  }();
  CHECK((whole - ref).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(gibbs_reduced_density(build_ising(16, kIsing), 0.2, {0, 1}), CapacityError);
}

TEST_CASE("symmetric sector basis") {
  const SymmetricBasis b8(8);
  CHECK(b8.dimension() == 30);
  long total = 0;
  for (int s : b8.orbit_sizes()) total += s;
  CHECK(total == 256);

  // sector spectrum is a subset of the full one
  const auto h = build_ising(8, kIsing);
  const RealVector full = sector_spectrum(h, ShellSector::Full);
  const RealVector sym = sector_spectrum(h, ShellSector::ZeroMomentumEvenReflection);
  for (Eigen::Index i = 0; i < sym.size(); ++i) CHECK((full.array() - sym[i]).abs().minCoeff() < 1e-10);
  CHECK(sym[0] == doctest::Approx(-10.136937938826).epsilon(1e-11));
}

TEST_CASE("energy shell counting") {
  const auto h = build_ising(8, kIsing);
  const double e_beta = -3.363702858151;
  CHECK(shell_dimension(h, e_beta, 0.5, ShellSector::Full) == 45);
  CHECK(shell_dimension(h, e_beta, 0.5, ShellSector::ZeroMomentumEvenReflection) == 5);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(shell_dimension(h, inf, inf, ShellSector::Full) == 256);
  CHECK(shell_dimension(h, inf, inf, ShellSector::ZeroMomentumEvenReflection) == 30);
  long prev = 0;
  const RealVector spec = sector_spectrum(h, ShellSector::Full);
  for (double w = 0.05; w < 3.0; w += 0.05) {
    const long c = count_in_shell(spec, e_beta, w, 8);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK_THROWS_AS(shell_dimension(h, e_beta, 0.0, ShellSector::Full), InvalidArgument);
  CHECK(shell_dimension(build_ising(10, kIsing), -4.204546266611, 0.5, ShellSector::ZeroMomentumEvenReflection) == 15);
}
