#include "qprep/pauli/pauli_string.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>

#include "qprep/core/error.hpp"

namespace qprep::pauli {

namespace {

constexpr int kMaxSites = 30;

char axis_char(Axis a) {
  switch (a) {
    case Axis::X: return 'X';
    case Axis::Y: return 'Y';
    case Axis::Z: return 'Z';
  }
  return '?';
}

cplx i_power(int n) {
  switch (n & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

PauliString::PauliString(double coefficient, std::vector<PauliFactor> factors)
    : coefficient_(coefficient), factors_(std::move(factors)) {
  QPREP_REQUIRE(std::isfinite(coefficient_) && coefficient_ != 0.0,
                "PauliString coefficient must be finite and nonzero");
  std::sort(factors_.begin(), factors_.end(),
            [](const PauliFactor& a, const PauliFactor& b) { return a.site < b.site; });
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const auto& f = factors_[i];
    QPREP_REQUIRE(f.site >= 0 && f.site < kMaxSites, "PauliString site out of range");
    QPREP_REQUIRE(i == 0 || factors_[i - 1].site < f.site, "PauliString has repeated site");
    const std::uint64_t bit = std::uint64_t{1} << f.site;
    if (f.axis != Axis::Z) flip_mask_ |= bit;
    if (f.axis != Axis::X) sign_mask_ |= bit;
    if (f.axis == Axis::Y) ++y_count_;
  }
}

cplx PauliString::amplitude(std::uint64_t index) const {
  const int downs = std::popcount(~index & sign_mask_);
  const double sign = (downs & 1) ? -1.0 : 1.0;
  return coefficient_ * sign * i_power(y_count_);
}

int PauliString::max_site() const { return factors_.empty() ? -1 : factors_.back().site; }

std::string PauliString::to_string() const {
  std::ostringstream os;
  os << coefficient_;
  for (const auto& f : factors_) os << ' ' << axis_char(f.axis) << f.site;
  return os.str();
}

SpinHamiltonian::SpinHamiltonian(int n_sites, bool periodic) : n_sites_(n_sites), periodic_(periodic) {
  QPREP_REQUIRE(n_sites >= 1 && n_sites <= kMaxSites, "SpinHamiltonian: site count out of range");
}

void SpinHamiltonian::add(PauliString term) {
  QPREP_REQUIRE(term.max_site() < n_sites_, "SpinHamiltonian: term acts outside the chain");
  terms_.push_back(std::move(term));
}

void SpinHamiltonian::add(double coefficient, std::initializer_list<PauliFactor> factors) {
  add(PauliString(coefficient, std::vector<PauliFactor>(factors)));
}

SpinHamiltonian& SpinHamiltonian::operator+=(const SpinHamiltonian& other) {
  if (n_sites_ == 0) {
    *this = other;
    return *this;
  }
  QPREP_REQUIRE(other.n_sites_ == 0 || other.n_sites_ == n_sites_, "SpinHamiltonian: size mismatch in sum");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

SpinHamiltonian operator+(SpinHamiltonian lhs, const SpinHamiltonian& rhs) {
  lhs += rhs;
  return lhs;
}

SpinHamiltonian SpinHamiltonian::scaled(double factor) const {
  SpinHamiltonian out(n_sites_, periodic_);
  if (factor == 0.0) return out;
  for (const auto& t : terms_) {
    out.terms_.emplace_back(t.coefficient() * factor,
                            std::vector<PauliFactor>(t.factors().begin(), t.factors().end()));
  }
  return out;
}

bool SpinHamiltonian::is_real() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const PauliString& t) { return t.y_count() % 2 == 0; });
}

ComplexMatrix SpinHamiltonian::dense() const {
  QPREP_REQUIRE(n_sites_ <= 14, "SpinHamiltonian::dense: L too large for a dense matrix");
  const std::uint64_t dim = std::uint64_t{1} << n_sites_;
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& t : terms_) {
    for (std::uint64_t b = 0; b < dim; ++b) {
      m(static_cast<Eigen::Index>(b ^ t.flip_mask()), static_cast<Eigen::Index>(b)) += t.amplitude(b);
    }
  }
  return m;
}

RealMatrix SpinHamiltonian::dense_real() const {
  QPREP_REQUIRE(is_real(), "SpinHamiltonian::dense_real: operator has imaginary matrix elements");
  return dense().real();
}

SpinHamiltonian build_ising(int n_sites, const IsingCouplings& c) {
  QPREP_REQUIRE(n_sites >= 2, "build_ising: L must be at least 2");
  SpinHamiltonian h(n_sites);
  for (int l = 0; l < n_sites; ++l) {
    const int r = (l + 1) % n_sites;
    if (c.J != 0.0) h.add(c.J, {{l, Axis::Z}, {r, Axis::Z}});
  }
  for (int l = 0; l < n_sites; ++l) {
    if (c.h != 0.0) h.add(c.h, {{l, Axis::Z}});
  }
  for (int l = 0; l < n_sites; ++l) {
    if (c.g != 0.0) h.add(c.g, {{l, Axis::X}});
  }
  return h;
}

namespace {

SpinHamiltonian symmetric_bond_sum(int n_sites, Axis a, Axis b) {
  SpinHamiltonian out(n_sites);
  for (int l = 0; l < n_sites; ++l) {
    const int r = (l + 1) % n_sites;
    out.add(1.0, {{l, a}, {r, b}});
    out.add(1.0, {{l, b}, {r, a}});
  }
  return out;
}

}  // namespace

SpinHamiltonian build_generator_ising(int index, int n_sites, const IsingCouplings& c) {
  QPREP_REQUIRE(n_sites >= 2, "build_generator_ising: L must be at least 2");
  switch (index) {
    case 0: return build_ising(n_sites, c);
    case 1: return build_ising(n_sites, {c.J, c.h, 0.0});
    case 2: return build_ising(n_sites, {0.0, 0.0, c.g});
    case 3: {
      SpinHamiltonian out(n_sites);
      for (int l = 0; l < n_sites; ++l) out.add(1.0, {{l, Axis::Y}});
      return out;
    }
    case 4: return symmetric_bond_sum(n_sites, Axis::X, Axis::Y);
    case 5: return symmetric_bond_sum(n_sites, Axis::Y, Axis::Z);
    default: throw InvalidArgument("build_generator_ising: index must be in [0,6)");
  }
}

std::string ising_generator_name(int index) {
  static const char* names[] = {"H_Ising", "sum J ZZ + h Z", "g sum X", "sum Y", "sum XY + YX", "sum YZ + ZY"};
  QPREP_REQUIRE(index >= 0 && index < kIsingGeneratorCount, "ising_generator_name: index out of range");
  return names[index];
}

SpinHamiltonian build_xx(int n_sites, double J, double h) {
  QPREP_REQUIRE(n_sites >= 2, "build_xx: L must be at least 2");
  SpinHamiltonian out(n_sites);
  for (int l = 0; l < n_sites; ++l) {
    const int r = (l + 1) % n_sites;
    if (J != 0.0) {
      out.add(-0.5 * J, {{l, Axis::X}, {r, Axis::X}});
      out.add(-0.5 * J, {{l, Axis::Y}, {r, Axis::Y}});
    }
    if (h != 0.0) out.add(-h, {{l, Axis::Z}});
  }
  return out;
}

SpinHamiltonian z_string_density(int n_sites, int range) {
  QPREP_REQUIRE(range >= 1 && range <= n_sites, "z_string_density: range must be in [1, L]");
  SpinHamiltonian out(n_sites);
  for (int l = 0; l < n_sites; ++l) {
    std::vector<PauliFactor> f;
    for (int j = 0; j < range; ++j) f.push_back({(l + j) % n_sites, Axis::Z});
    out.add(PauliString(1.0 / n_sites, std::move(f)));
  }
  return out;
}

SpinHamiltonian magnetization_density(int n_sites) { return z_string_density(n_sites, 1); }

CompiledOperator::CompiledOperator(const SpinHamiltonian& h) : n_sites_(h.n_sites()) {
  QPREP_REQUIRE(n_sites_ >= 1, "CompiledOperator: empty chain");
  const std::uint64_t dim = dimension();
  std::map<std::uint64_t, std::size_t> slot;
  for (const auto& t : h.terms()) {
    norm_bound_ += std::abs(t.coefficient());
    auto [it, inserted] = slot.try_emplace(t.flip_mask(), groups_.size());
    if (inserted) groups_.push_back({t.flip_mask(), ComplexVector::Zero(static_cast<Eigen::Index>(dim))});
    auto& amp = groups_[it->second].amplitude;
    for (std::uint64_t b = 0; b < dim; ++b) amp[static_cast<Eigen::Index>(b)] += t.amplitude(b);
  }
}

void CompiledOperator::apply(const ComplexVector& in, ComplexVector& out) const {
  const auto dim = static_cast<Eigen::Index>(dimension());
  QPREP_REQUIRE(in.size() == dim, "CompiledOperator::apply: size mismatch");
  out.setZero(dim);
  for (const auto& g : groups_) {
    if (g.flip == 0) {
      out.array() += g.amplitude.array() * in.array();
      continue;
    }
    const cplx* a = g.amplitude.data();
    const cplx* x = in.data();
    cplx* y = out.data();
    for (Eigen::Index b = 0; b < dim; ++b) y[static_cast<std::uint64_t>(b) ^ g.flip] += a[b] * x[b];
  }
}

ComplexVector CompiledOperator::apply(const ComplexVector& in) const {
  ComplexVector out;
  apply(in, out);
  return out;
}

}  // namespace qprep::pauli
