#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qprep/core/types.hpp"
#include "qprep/env/environment.hpp"
#include "qprep/fermion/gge.hpp"
#include "qprep/pauli/gibbs.hpp"

namespace qprep::eval {

/// Denominator of the normalized Frobenius distance:
/// Sum        sqrt(||rho||_F^2 + ||rho'||_F^2)
/// Difference sqrt(||rho||_F^2 - ||rho'||_F^2), undefined unless ||rho|| > ||rho'||
enum class DistanceNorm { Sum, Difference };

std::string to_string(DistanceNorm n);
DistanceNorm parse_distance_norm(const std::string& s);

/// D from ||rho - rho'||_F^2 and the two purities.
double normalized_distance(double diff_sq, double purity, double purity_prime, DistanceNorm norm);

/// Both arguments must be Hermitian with unit trace (tolerance 1e-8).
double distance(const ComplexMatrix& rho, const ComplexMatrix& rho_prime, DistanceNorm norm = DistanceNorm::Sum);

/// Same quantity for two Gaussian states given by their block correlation
/// matrices, without building 2^LA matrices.
double gaussian_distance(const ComplexMatrix& c_a, const ComplexMatrix& c_a_prime,
                         DistanceNorm norm = DistanceNorm::Sum);

/// Reference reduced states on the blocks [0, LA). Spin backends store dense
/// density matrices, free-fermion backends correlation blocks.
struct BlockReference {
  int n_sites = 0;
  std::vector<int> las;
  std::vector<ComplexMatrix> dense;
  std::vector<ComplexMatrix> correlation;

  bool gaussian() const { return !correlation.empty(); }
};

/// Gibbs reduced states of `h`: exact when opts.method is Exact, otherwise the
/// typical-state estimate.
BlockReference gibbs_reference(const pauli::SpinHamiltonian& h, double beta, const std::vector<int>& las,
                               const pauli::GibbsOptions& opts = {});
BlockReference gge_reference(const fermion::GgeSpec& spec, const std::vector<int>& las);
/// Reference matching the environment's target (Gibbs or GGE).
BlockReference target_reference(const env::EnvConfig& cfg, const env::EnsembleTarget& target,
                                const std::vector<int>& las);

/// Distance of the backend's current state to reference block k.
double block_distance(const env::PhysicsBackend& state, const BlockReference& ref, std::size_t k,
                      DistanceNorm norm = DistanceNorm::Sum);

struct DistanceSeries {
  std::vector<double> times;
  std::vector<double> values;
  int la = 0;
  int n_sites = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Free evolution of the environment's current state for `duration`, one
/// series per reference block. Times are measured from the start of the
/// relaxation.
std::vector<DistanceSeries> relaxation_distances(const env::Environment& env, double duration,
                                                 const BlockReference& ref, std::uint64_t seed,
                                                 DistanceNorm norm = DistanceNorm::Sum);

/// Arithmetic mean of the recorded distances; throws on an empty series.
double time_average(const DistanceSeries& s);

/// Sample standard deviation (n - 1); NaN for fewer than two values.
double sample_stddev(const std::vector<double>& v);

/// One row of the distance table. Per-seed rows carry the temporal spread in
/// sigma; the aggregate row (seed "all") averages the per-seed means and
/// carries their spread across seeds.
struct DistanceRow {
  int n_sites = 0;
  int la = 0;
  std::string seed;
  double dbar = 0.0;
  double sigma = 0.0;
};

std::vector<DistanceRow> distance_table(const std::vector<DistanceSeries>& series);

}  // namespace qprep::eval
