#include <doctest.h>

#include <cmath>
#include <random>

#include "qprep/core/error.hpp"
#include "qprep/env/backends.hpp"
#include "qprep/eval/report.hpp"
#include "qprep/eval/scaling.hpp"
#include "qprep/fermion/correlation.hpp"
#include "qprep/fermion/single_particle.hpp"
#include "qprep/oracle/dense_spin.hpp"
#include "qprep/oracle/fock.hpp"

using namespace qprep;
using namespace qprep::eval;

namespace {

ComplexMatrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = cplx(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

/// Random Gaussian state on L sites with its correlation matrix: a Slater
/// determinant for even draws, a strictly mixed state otherwise.
std::pair<ComplexMatrix, ComplexMatrix> random_gaussian(int n_sites, int draw, std::mt19937_64& rng) {
  fermion::SingleParticleOperator op;
  op.matrix = random_hermitian(n_sites, rng);
  if (draw % 2 == 0) {
    const int n = 1 + draw / 2 % (n_sites - 1);
    const ComplexVector psi = oracle::slater_ground_state(op, n);
    return {psi * psi.adjoint(), oracle::fock_correlation(psi)};
  }
  const ComplexMatrix rho = oracle::fock_gaussian_density(op.matrix);
  return {rho, oracle::fock_correlation(rho)};
}

}  // namespace

TEST_CASE("normalized Frobenius distance") {
  ComplexMatrix pure = ComplexMatrix::Zero(2, 2);
  pure(0, 0) = 1.0;
  const ComplexMatrix mixed = ComplexMatrix::Identity(2, 2) * 0.5;
  CHECK(distance(pure, pure) == 0.0);
  CHECK(distance(pure, mixed) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(distance(mixed, pure) == distance(pure, mixed));
  // difference normalization: sqrt(0.5 / (1 - 0.5)) = 1, undefined the other way round
  CHECK(distance(pure, mixed, DistanceNorm::Difference) == doctest::Approx(1.0));
  CHECK_THROWS_AS(distance(mixed, pure, DistanceNorm::Difference), DomainError);
  CHECK_THROWS_AS(distance(pure, pure, DistanceNorm::Difference), DomainError);
  CHECK_THROWS_AS(distance(pure * 2.0, mixed), InvalidArgument);
  CHECK(parse_distance_norm(to_string(DistanceNorm::Difference)) == DistanceNorm::Difference);

  // single-site Gaussian states: ||rho - rho'||^2 = 2 (n - n')^2
  ComplexMatrix c1(1, 1), c2(1, 1);
  c1(0, 0) = 0.3;
  c2(0, 0) = 0.8;
  const double p1 = 0.09 + 0.49, p2 = 0.64 + 0.04;
  CHECK(gaussian_distance(c1, c2) == doctest::Approx(std::sqrt(2 * 0.25 / (p1 + p2))).epsilon(1e-13));
  CHECK(gaussian_distance(c1, c1) == 0.0);
}

TEST_CASE("Gaussian distance matches dense reduced states") {
  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (int n_sites : {6, 8}) {
    const int draws = n_sites == 6 ? 10 : 12;
    std::vector<std::pair<ComplexMatrix, ComplexMatrix>> states;
    for (int d = 0; d < draws; ++d) states.push_back(random_gaussian(n_sites, d, rng));
    for (int d = 0; d + 1 < draws; ++d) {
      const auto& [rho, c] = states[static_cast<std::size_t>(d)];
      const auto& [rho2, c2] = states[static_cast<std::size_t>(d + 1)];
      for (int la = 1; la <= (n_sites == 6 ? 3 : 4); ++la) {
        // blocks starting at site 0 carry no Jordan-Wigner string
        const ComplexMatrix ra = oracle::trace_out(rho, n_sites, 0, la);
        const ComplexMatrix rb = oracle::trace_out(rho2, n_sites, 0, la);
        const double dense = distance(ra, rb);
        const double gauss = gaussian_distance(c.topLeftCorner(la, la), c2.topLeftCorner(la, la));
        worst = std::max(worst, std::abs(dense - gauss));
      }
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("time-averaged distance") {
  DistanceSeries s;
  s.times = {0.1, 0.2, 0.3};
  s.values = {0.2, 0.2, 0.2};
  CHECK(time_average(s) == doctest::Approx(0.2));
  DistanceSeries r = s;
  r.values = {0.1, 0.5, 0.3};
  DistanceSeries rev = r;
  std::reverse(rev.values.begin(), rev.values.end());
  CHECK(time_average(r) == time_average(rev));
  CHECK_THROWS_AS(time_average(DistanceSeries{}), InvalidArgument);
  DistanceSeries bad = s;
  bad.values[1] = -1.0;
  CHECK_THROWS_AS(time_average(bad), InvalidArgument);

  CHECK(sample_stddev({1.0, 2.0, 3.0}) == doctest::Approx(1.0));
  CHECK(std::isnan(sample_stddev({1.0})));

  s.la = 1;
  s.n_sites = 6;
  r.la = 1;
  r.n_sites = 6;
  r.seed = 1;
  const auto rows = distance_table({s, r});
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].seed == "all");
  CHECK(rows[2].dbar == doctest::Approx(0.25));

  SUBCASE("relaxation from the target state itself") {
    // the XX ground state is stationary, so a reference built from it gives D = 0
    env::EnvConfig cfg = env::gge_env_defaults(8);
    env::Environment e(cfg);
    e.reset();
    const auto& g = dynamic_cast<const env::GaussBackend&>(e.backend());
    BlockReference ref;
    ref.n_sites = 8;
    ref.las = {1, 2, 3};
    for (int la : ref.las) ref.correlation.push_back(fermion::block_correlation(g.correlation(), 0, la));
    const auto series = relaxation_distances(e, cfg.total_time(), ref, 3);
    REQUIRE(series.size() == 3);
    CHECK(series[0].values.size() == 200);
    CHECK(series[0].times.back() == doctest::Approx(40.0));
    for (const auto& x : series) CHECK(time_average(x) < 1e-7);
  }
  SUBCASE("Ising relaxation against the Gibbs reference") {
    env::EnvConfig cfg = env::gibbs_env_defaults(6);
    cfg.total_steps = 10;
    env::Environment e(cfg);
    e.reset();
    for (int a : {3, 3, 0, 4, 0, 3, 1, 2, 0, 0}) e.step(a);
    const BlockReference ref = target_reference(cfg, e.target(), {1, 2});
    const auto series = relaxation_distances(e, 1.0, ref, 0);
    CHECK(series[0].values.size() == 10);
    CHECK(time_average(series[0]) > 0.0);
    CHECK(time_average(series[0]) < 1.0);
    // stochastic reference agrees with the exact one to sampling accuracy
    pauli::GibbsOptions opts;
    opts.method = pauli::GibbsMethod::Stochastic;
    opts.samples = 64;
    const BlockReference st = gibbs_reference(pauli::build_ising(6, cfg.physics.ising), cfg.target.beta, {1, 2}, opts);
    CHECK(distance(st.dense[1], ref.dense[1]) < 0.05);
  }
}

TEST_CASE("power-law fits") {
  const std::vector<double> xs{8, 12, 16, 20, 24};
  for (double b : {0.3, 0.5, 0.7}) {
    std::vector<double> ys;
    for (double x : xs) ys.push_back(4.0 * std::pow(x, -b));
    const ScalingFit f = fit_power_law(xs, ys);
    CHECK(std::abs(f.b - b) <= 1e-10);
    CHECK(std::abs(f.a - 4.0) <= 1e-9);
    CHECK(f.residual < 1e-20);
  }
  // with per-point sigmas the exact law is still exact
  std::vector<double> ys, sig;
  for (double x : xs) {
    ys.push_back(2.0 * std::pow(x, -0.5));
    sig.push_back(0.1 * ys.back());
  }
  const ScalingFit w = fit_power_law(xs, ys, sig);
  CHECK(std::abs(w.b - 0.5) <= 1e-10);
  // weighted errors: slope variance 1 / sum w (u - ubar)^2 with w = 100
  double ubar = 0.0, suu = 0.0;
  for (double x : xs) ubar += std::log(x) / 5.0;
  for (double x : xs) suu += 100.0 * (std::log(x) - ubar) * (std::log(x) - ubar);
  CHECK(w.b_err == doctest::Approx(1.0 / std::sqrt(suu)));

  // noisy data: unweighted error from the residual variance
  std::vector<double> noisy{1.0, 0.8, 0.75, 0.6};
  const ScalingFit n = fit_power_law({1, 2, 3, 4}, noisy);
  CHECK(n.b_err > 0.0);
  CHECK(n.residual > 0.0);

  CHECK_THROWS_AS(fit_power_law({1, 2}, {1, 2}), InvalidArgument);
  CHECK_THROWS_AS(fit_power_law({1, 2, 3}, {1, -2, 3}), InvalidArgument);
  CHECK_THROWS_AS(fit_power_law({1, 3, 2}, {1, 2, 3}), InvalidArgument);
}

TEST_CASE("shell-width sweep") {
  const pauli::IsingCouplings c{};
  std::vector<ShellPoint> pts;
  for (int l : {6, 8, 10}) {
    const double e = ising_thermal_energy(l, 0.2, c);
    pts.push_back({l, 0.3 * std::pow(l, -1.0), 0.0, e});
  }
  const std::vector<double> widths{0.05, 0.1, 0.25, 0.5, 0.75, 1.0, 3.0};
  const auto rows = shell_width_sweep(c, pts, widths);
  REQUIRE(rows.size() == widths.size() * pts.size());
  // d non-decreasing in the width for each L
  for (std::size_t p = 0; p < pts.size(); ++p) {
    for (std::size_t w = 1; w < widths.size(); ++w) {
      CHECK(rows[w * pts.size() + p].d >= rows[(w - 1) * pts.size() + p].d);
    }
  }
  // a narrow shell at small L holds at most one state and is excluded
  CHECK(rows[0].d <= 1);
  CHECK_FALSE(rows[0].included);
  // the widest shells saturate at every sector state below the target energy
  const auto& last = rows[(widths.size() - 1) * pts.size()];
  const RealVector spec = pauli::sector_spectrum(pauli::build_ising(6, c), pauli::ShellSector::ZeroMomentumEvenReflection);
  long below = 0;
  for (Eigen::Index i = 0; i < spec.size(); ++i) below += spec[i] <= pts[0].energy;
  CHECK(last.d == below);
  CHECK(std::isfinite(last.b));
  const auto plateau = sweep_plateau(rows, 0.5);
  CHECK(std::isfinite(plateau.first));
  CHECK(plateau.second >= plateau.first);
}

TEST_CASE("truncated GGE locality") {
  env::EnvConfig cfg = env::gge_env_defaults(60);
  const fermion::GgeSpec gge = env::solve_target_gge(cfg);
  const auto rows = tgge_vs_gge(gge, 4, {1, 2, 3, 4, 5, 6, 7, 8});
  for (const auto& r : rows) {
    if (r.la <= 5) CHECK(r.distance <= 1e-8);
    if (r.la >= 7) CHECK(r.distance > 0.0);
  }
  // no truncation: identical ensembles
  for (const auto& r : tgge_vs_gge(gge, 30, {1, 4, 10})) CHECK(r.distance <= 1e-8);
}

TEST_CASE("trajectory reports") {
  SUBCASE("Gibbs") {
    env::EnvConfig cfg = env::gibbs_env_defaults(6);
    cfg.total_steps = 8;
    const env::EnsembleTarget t = env::compute_target(cfg);
    const std::vector<int> protocol{3, 3, 1, 0, 4, 5, 2, 0};
    const auto obs = default_report_observables(cfg);
    CHECK(obs == std::vector<std::string>{"z1", "z2", "z3"});
    const TrajectoryReport r = trajectory_report(cfg, t, protocol, obs, 0.5);
    CHECK(r.values.rows() == 1 + 8 + 5);
    CHECK(r.values(0, 0) == doctest::Approx(-1.0));  // all spins down
    CHECK(r.values(0, 1) == doctest::Approx(1.0));
    CHECK(r.actions[1] == 3);
    CHECK(r.actions.back() == -1);
    CHECK(r.times.back() == doctest::Approx(1.3));
    CHECK(std::isnan(r.relevant_gibbs[0]));
    CHECK(std::isfinite(r.target[2]));
    CHECK_THROWS_AS(trajectory_report(cfg, t, {0, 1}, obs), InvalidArgument);
  }
  SUBCASE("GGE with the relevant Gibbs ensemble") {
    env::EnvConfig cfg = env::gge_env_defaults(16);
    cfg.total_steps = 4;
    const env::EnsembleTarget t = env::compute_target(cfg);
    const auto obs = default_report_observables(cfg);
    CHECK(obs.size() == 16);
    CHECK(obs.front() == "liom_plus_1");
    CHECK(obs.back() == "gamma_8");
    const TrajectoryReport r = trajectory_report(cfg, t, {0, 1, 2, 0}, obs);
    CHECK(r.values.rows() == 5);
    const fermion::GgeSpec rg = relevant_gibbs(*t.gge);
    for (int n : {0, 1}) {
      CHECK(fermion::gge_moment(rg, {n, +1}) == doctest::Approx(fermion::gge_moment(*t.gge, {n, +1})).epsilon(1e-9));
    }
    // the Gibbs reference differs from the GGE in the shifted moments
    CHECK(std::abs(r.relevant_gibbs[1] - r.target[1]) > 1e-4);
    CHECK(r.relevant_gibbs[0] == doctest::Approx(r.target[0]).epsilon(1e-8));
  }
}
