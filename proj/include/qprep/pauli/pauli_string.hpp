#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "qprep/core/types.hpp"

namespace qprep::pauli {

// Basis convention: site l is bit l of the computational index, bit value 1
// is spin up. sigma^z |down> = -|down>, so |down ... down> is index 0.

enum class Axis : std::uint8_t { X, Y, Z };

struct PauliFactor {
  int site;
  Axis axis;
};

/// A real multiple of a product of single-site Pauli matrices.
class PauliString {
 public:
  /// Factors may be given in any order; duplicate sites are rejected.
  PauliString(double coefficient, std::vector<PauliFactor> factors);

  double coefficient() const { return coefficient_; }
  std::span<const PauliFactor> factors() const { return factors_; }

  /// Bits flipped by the X/Y factors.
  std::uint64_t flip_mask() const { return flip_mask_; }
  /// Sites carrying a Y or Z factor (they contribute a sign).
  std::uint64_t sign_mask() const { return sign_mask_; }
  int y_count() const { return y_count_; }

  /// Matrix element <index ^ flip_mask | P | index>, coefficient included.
  cplx amplitude(std::uint64_t index) const;

  int max_site() const;
  std::string to_string() const;

 private:
  double coefficient_;
  std::vector<PauliFactor> factors_;
  std::uint64_t flip_mask_ = 0;
  std::uint64_t sign_mask_ = 0;
  int y_count_ = 0;
};

/// Hermitian sum of Pauli strings on a ring of L sites.
class SpinHamiltonian {
 public:
  SpinHamiltonian() = default;
  explicit SpinHamiltonian(int n_sites, bool periodic = true);

  int n_sites() const { return n_sites_; }
  bool periodic() const { return periodic_; }
  const std::vector<PauliString>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add(PauliString term);
  void add(double coefficient, std::initializer_list<PauliFactor> factors);

  SpinHamiltonian& operator+=(const SpinHamiltonian& other);
  SpinHamiltonian scaled(double factor) const;

  /// True when every term has an even number of Y factors (real matrix).
  bool is_real() const;

  /// Explicit 2^L x 2^L matrix; only for small L.
  ComplexMatrix dense() const;
  RealMatrix dense_real() const;

 private:
  int n_sites_ = 0;
  bool periodic_ = true;
  std::vector<PauliString> terms_;
};

SpinHamiltonian operator+(SpinHamiltonian lhs, const SpinHamiltonian& rhs);

struct IsingCouplings {
  double J = 1.0;
  double h = 0.8090;
  double g = 0.9045;
};

/// sum_l [ J Z_l Z_{l+1} + h Z_l + g X_l ] with the periodic bond included.
/// At L = 2 the bond (0,1) appears twice.
SpinHamiltonian build_ising(int n_sites, const IsingCouplings& c);

inline constexpr int kIsingGeneratorCount = 6;

/// The six control generators, in protocol index order:
/// 0 H, 1 sum J ZZ + h Z, 2 g sum X, 3 sum Y, 4 sum XY + YX, 5 sum YZ + ZY.
SpinHamiltonian build_generator_ising(int index, int n_sites, const IsingCouplings& c);
std::string ising_generator_name(int index);

/// -sum_l [ J/2 (X_l X_{l+1} + Y_l Y_{l+1}) + h Z_l ], periodic.
SpinHamiltonian build_xx(int n_sites, double J, double h);

/// L^{-1} sum_l Z_l ... Z_{l+r-1}: the Z^(r)/L string densities.
SpinHamiltonian z_string_density(int n_sites, int range);

/// L^{-1} sum_l Z_l.
SpinHamiltonian magnetization_density(int n_sites);

/// Matrix-free form of a SpinHamiltonian: terms grouped by flip mask with the
/// per-basis-state amplitudes tabulated once.
class CompiledOperator {
 public:
  CompiledOperator() = default;
  explicit CompiledOperator(const SpinHamiltonian& h);

  int n_sites() const { return n_sites_; }
  std::size_t dimension() const { return std::size_t{1} << n_sites_; }

  /// out = H in (out is overwritten).
  void apply(const ComplexVector& in, ComplexVector& out) const;
  ComplexVector apply(const ComplexVector& in) const;

  /// Cheap upper bound on the operator norm (sum of |coefficients|).
  double norm_bound() const { return norm_bound_; }

 private:
  struct Group {
    std::uint64_t flip;
    ComplexVector amplitude;
  };
  int n_sites_ = 0;
  double norm_bound_ = 0.0;
  std::vector<Group> groups_;
};

}  // namespace qprep::pauli
