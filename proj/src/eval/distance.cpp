#include "qprep/eval/distance.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "qprep/core/error.hpp"
#include "qprep/fermion/correlation.hpp"
#include "qprep/fermion/gaussian.hpp"
#include "qprep/pauli/reduced_density.hpp"

namespace qprep::eval {

std::string to_string(DistanceNorm n) { return n == DistanceNorm::Sum ? "sum" : "difference"; }

DistanceNorm parse_distance_norm(const std::string& s) {
  if (s == "sum") return DistanceNorm::Sum;
  if (s == "difference") return DistanceNorm::Difference;
  throw InvalidArgument("unknown distance normalization '" + s + "' (expected sum or difference)");
}

double normalized_distance(double diff_sq, double purity, double purity_prime, DistanceNorm norm) {
  const double radicand = norm == DistanceNorm::Sum ? purity + purity_prime : purity - purity_prime;
  if (!(radicand > 0.0)) {
    throw DomainError("distance: ||rho||_F^2 - ||rho'||_F^2 = " + std::to_string(radicand) +
                      " is not positive under the difference normalization");
  }
  return std::sqrt(std::max(diff_sq, 0.0) / radicand);
}

namespace {

void check_density(const ComplexMatrix& rho, const char* which) {
  QPREP_REQUIRE(rho.rows() == rho.cols() && rho.rows() > 0, std::string("distance: ") + which + " is not square");
  QPREP_REQUIRE((rho - rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-8, std::string("distance: ") + which + " is not Hermitian");
  QPREP_REQUIRE(std::abs(rho.trace() - cplx(1.0)) <= 1e-8, std::string("distance: ") + which + " does not have unit trace");
}

}  // namespace

double distance(const ComplexMatrix& rho, const ComplexMatrix& rho_prime, DistanceNorm norm) {
  check_density(rho, "rho");
  check_density(rho_prime, "rho'");
  QPREP_REQUIRE(rho.rows() == rho_prime.rows(), "distance: dimensions differ");
  return normalized_distance((rho - rho_prime).squaredNorm(), rho.squaredNorm(), rho_prime.squaredNorm(), norm);
}

double gaussian_distance(const ComplexMatrix& c_a, const ComplexMatrix& c_a_prime, DistanceNorm norm) {
  QPREP_REQUIRE(c_a.rows() == c_a_prime.rows() && c_a.cols() == c_a_prime.cols(),
                "gaussian_distance: block sizes differ");
  const double p = fermion::gaussian_purity(c_a);
  const double pp = fermion::gaussian_purity(c_a_prime);
  return normalized_distance(fermion::gaussian_frobenius_sq(c_a, c_a_prime), p, pp, norm);
}

BlockReference gibbs_reference(const pauli::SpinHamiltonian& h, double beta, const std::vector<int>& las,
                               const pauli::GibbsOptions& opts) {
  BlockReference ref;
  ref.n_sites = h.n_sites();
  ref.las = las;
  std::vector<pauli::SiteBlock> blocks;
  for (int la : las) blocks.push_back({0, la});
  if (opts.method == pauli::GibbsMethod::Exact) {
    if (h.n_sites() > opts.exact_cap) {
      throw CapacityError("gibbs_reference: L = " + std::to_string(h.n_sites()) + " exceeds the exact cap " +
                          std::to_string(opts.exact_cap));
    }
    const pauli::Spectrum sp = pauli::diagonalize(h, opts.exact_cap);
    for (const auto& b : blocks) ref.dense.push_back(pauli::gibbs_reduced_density(sp, h.n_sites(), beta, b));
  } else {
    ref.dense = pauli::stochastic_gibbs_reduced_density(h, beta, blocks, opts);
  }
  return ref;
}

BlockReference gge_reference(const fermion::GgeSpec& spec, const std::vector<int>& las) {
  BlockReference ref;
  ref.n_sites = spec.n_sites;
  ref.las = las;
  const fermion::CorrelationMatrix c = fermion::gge_correlation_matrix(spec);
  for (int la : las) ref.correlation.push_back(fermion::block_correlation(c, 0, la));
  return ref;
}

BlockReference target_reference(const env::EnvConfig& cfg, const env::EnsembleTarget& target,
                                const std::vector<int>& las) {
  if (cfg.target.kind == env::TargetKind::Gge) {
    QPREP_REQUIRE(target.gge.has_value(), "target_reference: GGE target without multipliers");
    return gge_reference(*target.gge, las);
  }
  QPREP_REQUIRE(cfg.backend == env::BackendKind::IsingDense, "target_reference: Gibbs targets need the Ising backend");
  pauli::GibbsOptions opts;
  opts.method = cfg.n_sites <= cfg.target.exact_cap ? pauli::GibbsMethod::Exact : pauli::GibbsMethod::Stochastic;
  opts.exact_cap = std::max(cfg.target.exact_cap, 2);
  opts.samples = cfg.target.samples;
  opts.seed = cfg.target.seed;
  opts.propagator = cfg.physics.propagator;
  return gibbs_reference(pauli::build_ising(cfg.n_sites, cfg.physics.ising), cfg.target.beta, las, opts);
}

double block_distance(const env::PhysicsBackend& state, const BlockReference& ref, std::size_t k, DistanceNorm norm) {
  QPREP_REQUIRE(k < ref.las.size(), "block_distance: block index out of range");
  QPREP_REQUIRE(state.n_sites() == ref.n_sites, "block_distance: system sizes differ");
  const int la = ref.las[k];
  if (ref.gaussian()) {
    const auto* g = dynamic_cast<const env::GaussBackend*>(&state);
    QPREP_REQUIRE(g != nullptr, "block_distance: a Gaussian reference needs the xx-gauss backend");
    return gaussian_distance(fermion::block_correlation(g->correlation(), 0, la), ref.correlation[k], norm);
  }
  const pauli::StateVector* psi = nullptr;
  if (const auto* s = dynamic_cast<const env::IsingBackend*>(&state)) psi = &s->state();
  if (const auto* s = dynamic_cast<const env::XxDenseBackend*>(&state)) psi = &s->state();
  QPREP_REQUIRE(psi != nullptr, "block_distance: a dense reference needs a spin-basis backend");
  return distance(pauli::reduced_density(*psi, {0, la}, ref.n_sites), ref.dense[k], norm);
}

void DistanceSeries::validate() const {
  QPREP_REQUIRE(times.size() == values.size(), "DistanceSeries: times and values differ in length");
  for (double v : values) QPREP_REQUIRE(v >= 0.0, "DistanceSeries: negative distance");
}

std::vector<DistanceSeries> relaxation_distances(const env::Environment& env, double duration,
                                                 const BlockReference& ref, std::uint64_t seed, DistanceNorm norm) {
  std::vector<DistanceSeries> out(ref.las.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].la = ref.las[k];
    out[k].n_sites = ref.n_sites;
    out[k].seed = seed;
  }
  env.free_relaxation(duration, [&](env::PhysicsBackend& state, double t) {
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k].times.push_back(t);
      out[k].values.push_back(block_distance(state, ref, k, norm));
    }
  });
  return out;
}

double time_average(const DistanceSeries& s) {
  s.validate();
  if (s.values.empty()) throw InvalidArgument("time_average: empty trajectory");
  double acc = 0.0;
  for (double v : s.values) acc += v;
  return acc / static_cast<double>(s.values.size());
}

double sample_stddev(const std::vector<double>& v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<DistanceRow> distance_table(const std::vector<DistanceSeries>& series) {
  std::vector<DistanceRow> rows;
  std::map<std::pair<int, int>, std::vector<double>> groups;
  for (const auto& s : series) {
    const double m = time_average(s);
    rows.push_back({s.n_sites, s.la, std::to_string(s.seed), m, sample_stddev(s.values)});
    groups[{s.n_sites, s.la}].push_back(m);
  }
  for (const auto& [key, means] : groups) {
    double acc = 0.0;
    for (double m : means) acc += m;
    rows.push_back({key.first, key.second, "all", acc / static_cast<double>(means.size()), sample_stddev(means)});
  }
  return rows;
}

}  // namespace qprep::eval
