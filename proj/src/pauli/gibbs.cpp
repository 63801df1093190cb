#include "qprep/pauli/gibbs.hpp"

#include <cmath>
#include <random>

#include "qprep/core/error.hpp"
#include "qprep/core/parallel.hpp"

namespace qprep::pauli {

Spectrum diagonalize(const SpinHamiltonian& h, int cap) {
  if (h.n_sites() > cap) {
    throw CapacityError("exact diagonalization refused: L=" + std::to_string(h.n_sites()) +
                        " exceeds the cap " + std::to_string(cap));
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(h.dense_real());
  if (eig.info() != Eigen::Success) throw NumericalError("diagonalize: eigensolver failed");
  return {eig.eigenvalues(), eig.eigenvectors()};
}

RealVector boltzmann_weights(const RealVector& energies, double beta) {
  QPREP_REQUIRE(beta >= 0.0 && std::isfinite(beta), "beta must be finite and non-negative");
  const double e0 = energies.minCoeff();
  RealVector w = (-beta * (energies.array() - e0)).exp().matrix();
  return w / w.sum();
}

namespace {

GibbsTarget exact_gibbs(const SpinHamiltonian& h, double beta, const std::vector<NamedObservable>& observables,
                        int cap) {
  const Spectrum s = diagonalize(h, cap);
  const RealVector w = boltzmann_weights(s.energies, beta);
  GibbsTarget out;
  out.beta = beta;
  out.method = GibbsMethod::Exact;
  for (const auto& o : observables) {
    QPREP_REQUIRE(o.op.n_sites() == h.n_sites(), "gibbs_expectations: observable size mismatch");
    double mean = 0.0, second = 0.0;
    if (!o.op.empty()) {
      const CompiledOperator op(o.op);
      for (Eigen::Index n = 0; n < w.size(); ++n) {
        if (w[n] < 1e-300) continue;
        const ComplexVector v = s.vectors.col(n).cast<cplx>();
        const ComplexVector ov = op.apply(v);
        mean += w[n] * v.dot(ov).real();
        second += w[n] * ov.squaredNorm();
      }
    }
    out.expectations[o.name] = mean;
    out.variances[o.name] = std::max(0.0, second - mean * mean);
    out.stderrs[o.name] = 0.0;
  }
  return out;
}

/// Jackknife error of the ratio estimator sum(num)/sum(den).
double jackknife_ratio_stderr(const std::vector<double>& num, const std::vector<double>& den) {
  const std::size_t n = num.size();
  if (n < 2) return std::numeric_limits<double>::infinity();
  double sn = 0.0, sd = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sn += num[i];
    sd += den[i];
  }
  std::vector<double> loo(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    loo[i] = (sn - num[i]) / (sd - den[i]);
    mean += loo[i];
  }
  mean /= static_cast<double>(n);
  double acc = 0.0;
  for (double x : loo) acc += (x - mean) * (x - mean);
  return std::sqrt(acc * static_cast<double>(n - 1) / static_cast<double>(n));
}

GibbsTarget stochastic_gibbs(const SpinHamiltonian& h, double beta, const std::vector<NamedObservable>& observables,
                             const GibbsOptions& opts) {
  QPREP_REQUIRE(opts.samples >= 2, "stochastic Gibbs estimate needs at least two samples");
  const CompiledOperator hop(h);
  std::vector<CompiledOperator> ops;
  for (const auto& o : observables) {
    QPREP_REQUIRE(o.op.n_sites() == h.n_sites(), "gibbs_expectations: observable size mismatch");
    ops.emplace_back(o.op.empty() ? CompiledOperator() : CompiledOperator(o.op));
  }

  const auto n_samples = static_cast<std::size_t>(opts.samples);
  const std::size_t n_obs = observables.size();
  std::vector<double> weight(n_samples);
  std::vector<std::vector<double>> first(n_obs, std::vector<double>(n_samples));
  std::vector<std::vector<double>> second(n_obs, std::vector<double>(n_samples));

  parallel_for(n_samples, opts.threads, [&](std::size_t s) {
    std::seed_seq seq{opts.seed, static_cast<std::uint64_t>(s), std::uint64_t{0x7470}};
    std::mt19937_64 rng(seq);
    const StateVector r = StateVector::haar_random(h.n_sites(), rng);
    const ComplexVector phi = imaginary_time_evolve(hop, r.amplitudes(), 0.5 * beta, opts.propagator);
    weight[s] = phi.squaredNorm();
    for (std::size_t k = 0; k < n_obs; ++k) {
      if (observables[k].op.empty()) {
        first[k][s] = second[k][s] = 0.0;
        continue;
      }
      const ComplexVector ov = ops[k].apply(phi);
      first[k][s] = phi.dot(ov).real();
      second[k][s] = ov.squaredNorm();
    }
  });

  GibbsTarget out;
  out.beta = beta;
  out.method = GibbsMethod::Stochastic;
  out.sample_count = opts.samples;
  double wsum = 0.0;
  for (double w : weight) wsum += w;
  for (std::size_t k = 0; k < n_obs; ++k) {
    double f = 0.0, s2 = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
      f += first[k][s];
      s2 += second[k][s];
    }
    const double mean = f / wsum;
    const std::string& name = observables[k].name;
    out.expectations[name] = mean;
    out.variances[name] = std::max(0.0, s2 / wsum - mean * mean);
    double se = jackknife_ratio_stderr(first[k], weight);
    // a traceless observable at beta = 0 can give an exactly vanishing spread
    if (!(se > 0.0)) se = std::numeric_limits<double>::min();
    out.stderrs[name] = se;
    if (se > opts.stderr_tolerance) out.stderr_warning = true;
  }
  return out;
}

}  // namespace

GibbsTarget gibbs_expectations(const SpinHamiltonian& h, double beta, const std::vector<NamedObservable>& observables,
                               const GibbsOptions& opts) {
  QPREP_REQUIRE(beta >= 0.0 && std::isfinite(beta), "gibbs_expectations: beta must be finite and non-negative");
  QPREP_REQUIRE(!h.empty(), "gibbs_expectations: empty Hamiltonian");
  if (opts.method == GibbsMethod::Exact) return exact_gibbs(h, beta, observables, opts.exact_cap);
  return stochastic_gibbs(h, beta, observables, opts);
}

ComplexMatrix gibbs_reduced_density(const Spectrum& spectrum, int n_sites, double beta, SiteBlock block) {
  validate_block(block, n_sites);
  QPREP_REQUIRE(spectrum.vectors.rows() == (Eigen::Index{1} << n_sites), "gibbs_reduced_density: spectrum size mismatch");
  const RealVector w = boltzmann_weights(spectrum.energies, beta);
  const Eigen::Index da = Eigen::Index{1} << block.length;
  const Eigen::Index de = Eigen::Index{1} << (n_sites - block.length);
  const std::uint64_t block_mask = (std::uint64_t{1} << block.length) - 1;
  const std::uint64_t low_mask = (std::uint64_t{1} << block.first) - 1;
  RealMatrix rho = RealMatrix::Zero(da, da);
  RealMatrix m(da, de);
  for (Eigen::Index n = 0; n < w.size(); ++n) {
    if (w[n] == 0.0) continue;
    for (Eigen::Index b = 0; b < spectrum.vectors.rows(); ++b) {
      const auto u = static_cast<std::uint64_t>(b);
      const auto a = static_cast<Eigen::Index>((u >> block.first) & block_mask);
      const auto e = static_cast<Eigen::Index>((u & low_mask) | ((u >> (block.first + block.length)) << block.first));
      m(a, e) = spectrum.vectors(b, n);
    }
    rho.noalias() += w[n] * (m * m.transpose());
  }
  return (0.5 * (rho + rho.transpose())).cast<cplx>();
}

ComplexMatrix gibbs_reduced_density(const SpinHamiltonian& h, double beta, SiteBlock block, int cap) {
  return gibbs_reduced_density(diagonalize(h, cap), h.n_sites(), beta, block);
}

std::vector<ComplexMatrix> stochastic_gibbs_reduced_density(const SpinHamiltonian& h, double beta,
                                                            const std::vector<SiteBlock>& blocks,
                                                            const GibbsOptions& opts) {
  QPREP_REQUIRE(beta >= 0.0 && std::isfinite(beta), "stochastic_gibbs_reduced_density: beta must be finite and non-negative");
  QPREP_REQUIRE(opts.samples >= 1, "stochastic_gibbs_reduced_density: needs at least one sample");
  for (const auto& b : blocks) validate_block(b, h.n_sites());
  const CompiledOperator hop(h);
  const auto n_samples = static_cast<std::size_t>(opts.samples);
  std::vector<std::vector<ComplexMatrix>> parts(n_samples);
  std::vector<double> weight(n_samples);
  parallel_for(n_samples, opts.threads, [&](std::size_t s) {
    std::seed_seq seq{opts.seed, static_cast<std::uint64_t>(s), std::uint64_t{0x7264}};
    std::mt19937_64 rng(seq);
    const StateVector r = StateVector::haar_random(h.n_sites(), rng);
    ComplexVector amp = imaginary_time_evolve(hop, r.amplitudes(), 0.5 * beta, opts.propagator);
    weight[s] = amp.squaredNorm();
    const StateVector phi(h.n_sites(), std::move(amp));
    for (const auto& b : blocks) parts[s].push_back(reduced_density(phi, b, h.n_sites()) * weight[s]);
  });
  double wsum = 0.0;
  for (double w : weight) wsum += w;
  std::vector<ComplexMatrix> out;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    ComplexMatrix acc = ComplexMatrix::Zero(parts[0][k].rows(), parts[0][k].cols());
    for (std::size_t s = 0; s < n_samples; ++s) acc += parts[s][k];
    acc /= wsum;
    out.push_back(0.5 * (acc + acc.adjoint()));
  }
  return out;
}

}  // namespace qprep::pauli
