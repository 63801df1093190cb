#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "qprep/pauli/krylov.hpp"
#include "qprep/pauli/reduced_density.hpp"

namespace qprep::pauli {

enum class GibbsMethod { Exact, Stochastic };

struct NamedObservable {
  std::string name;
  SpinHamiltonian op;
};

struct GibbsOptions {
  GibbsMethod method = GibbsMethod::Exact;
  /// Exact diagonalization is refused above this L.
  int exact_cap = 14;
  int samples = 64;
  std::uint64_t seed = 1;
  /// Any stderr above this sets GibbsTarget::stderr_warning.
  double stderr_tolerance = std::numeric_limits<double>::infinity();
  int threads = 1;
  PropagatorOptions propagator{};
};

struct GibbsTarget {
  double beta = 0.0;
  GibbsMethod method = GibbsMethod::Exact;
  std::map<std::string, double> expectations;
  /// <O^2> - <O>^2 in the ensemble.
  std::map<std::string, double> variances;
  /// Jackknife standard errors; exactly zero for the exact method.
  std::map<std::string, double> stderrs;
  int sample_count = 0;
  bool stderr_warning = false;
};

/// Eigenpairs of a real Hamiltonian, ascending. Shared by the exact Gibbs and
/// shell routines.
struct Spectrum {
  RealVector energies;
  RealMatrix vectors;
};

Spectrum diagonalize(const SpinHamiltonian& h, int cap = 14);

/// Normalized Boltzmann weights exp(-beta (E - E_min)) / Z.
RealVector boltzmann_weights(const RealVector& energies, double beta);

GibbsTarget gibbs_expectations(const SpinHamiltonian& h, double beta, const std::vector<NamedObservable>& observables,
                               const GibbsOptions& opts = {});

/// Tr_{complement} exp(-beta H) / Z via exact diagonalization.
ComplexMatrix gibbs_reduced_density(const SpinHamiltonian& h, double beta, SiteBlock block, int cap = 14);
ComplexMatrix gibbs_reduced_density(const Spectrum& spectrum, int n_sites, double beta, SiteBlock block);

/// Typical-state estimate: sum_s Tr_B |phi_s><phi_s| / sum_s <phi_s|phi_s> with
/// phi_s = exp(-beta H / 2) r_s over Haar-random r_s. Uses opts.samples, seed,
/// threads and propagator; one matrix per requested block.
std::vector<ComplexMatrix> stochastic_gibbs_reduced_density(const SpinHamiltonian& h, double beta,
                                                            const std::vector<SiteBlock>& blocks,
                                                            const GibbsOptions& opts);

}  // namespace qprep::pauli
