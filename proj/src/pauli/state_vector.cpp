#include "qprep/pauli/state_vector.hpp"

#include <cmath>

#include "qprep/core/error.hpp"

namespace qprep::pauli {

StateVector::StateVector(int n_sites, ComplexVector amplitudes) : n_sites_(n_sites), amplitudes_(std::move(amplitudes)) {
  QPREP_REQUIRE(n_sites >= 1 && n_sites <= 30, "StateVector: site count out of range");
  QPREP_REQUIRE(amplitudes_.size() == (Eigen::Index{1} << n_sites), "StateVector: amplitude count must be 2^L");
  const double n = amplitudes_.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("StateVector: cannot normalize a zero or non-finite vector");
  amplitudes_ /= n;
}

StateVector StateVector::all_down(int n_sites) { return basis(n_sites, 0); }

StateVector StateVector::basis(int n_sites, std::uint64_t index) {
  QPREP_REQUIRE(n_sites >= 1 && n_sites <= 30, "StateVector: site count out of range");
  ComplexVector v = ComplexVector::Zero(Eigen::Index{1} << n_sites);
  QPREP_REQUIRE(index < static_cast<std::uint64_t>(v.size()), "StateVector::basis: index out of range");
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return StateVector(n_sites, std::move(v));
}

StateVector StateVector::haar_random(int n_sites, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexVector v(Eigen::Index{1} << n_sites);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v[i] = {re, im};
  }
  return StateVector(n_sites, std::move(v));
}

ComplexVector apply_hamiltonian(const SpinHamiltonian& h, const StateVector& psi) {
  QPREP_REQUIRE(h.n_sites() == psi.n_sites(), "apply_hamiltonian: size mismatch");
  if (h.empty()) return ComplexVector::Zero(static_cast<Eigen::Index>(psi.dimension()));
  return CompiledOperator(h).apply(psi.amplitudes());
}

namespace {

double real_part_checked(cplx v, const char* who) {
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real()))) {
    throw NumericalError(std::string(who) + ": expectation has a non-negligible imaginary part (operator not Hermitian?)");
  }
  return v.real();
}

}  // namespace

double expectation(const StateVector& psi, const CompiledOperator& o) {
  QPREP_REQUIRE(o.n_sites() == psi.n_sites(), "expectation: size mismatch");
  const ComplexVector hv = o.apply(psi.amplitudes());
  return real_part_checked(psi.amplitudes().dot(hv), "expectation");
}

double expectation(const StateVector& psi, const SpinHamiltonian& o) {
  QPREP_REQUIRE(o.n_sites() == psi.n_sites(), "expectation: size mismatch");
  if (o.empty()) return 0.0;
  return expectation(psi, CompiledOperator(o));
}

double variance(const StateVector& psi, const CompiledOperator& o) {
  QPREP_REQUIRE(o.n_sites() == psi.n_sites(), "variance: size mismatch");
  const ComplexVector hv = o.apply(psi.amplitudes());
  const double mean = real_part_checked(psi.amplitudes().dot(hv), "variance");
  const double second = hv.squaredNorm();
  const double var = second - mean * mean;
  if (var >= 0.0) return var;
  if (var < -1e-10 * std::max(1.0, second)) throw NumericalError("variance: negative beyond the rounding floor");
  return 0.0;
}

double variance(const StateVector& psi, const SpinHamiltonian& o) {
  QPREP_REQUIRE(o.n_sites() == psi.n_sites(), "variance: size mismatch");
  if (o.empty()) return 0.0;
  return variance(psi, CompiledOperator(o));
}

}  // namespace qprep::pauli
