#include "qprep/pauli/shell.hpp"

#include <algorithm>
#include <cmath>

#include "qprep/core/error.hpp"

namespace qprep::pauli {

namespace {

std::uint64_t rotate(std::uint64_t s, int n) {
  const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
  return ((s << 1) | (s >> (n - 1))) & mask;
}

std::uint64_t reflect(std::uint64_t s, int n) {
  std::uint64_t out = 0;
  for (int l = 0; l < n; ++l) {
    if ((s >> l) & 1u) out |= std::uint64_t{1} << (n - 1 - l);
  }
  return out;
}

}  // namespace

SymmetricBasis::SymmetricBasis(int n_sites) : n_sites_(n_sites) {
  QPREP_REQUIRE(n_sites >= 2 && n_sites <= 24, "SymmetricBasis: L out of range");
  const std::uint64_t dim = std::uint64_t{1} << n_sites;
  orbit_of_.assign(dim, -1);
  std::vector<std::uint64_t> images;
  for (std::uint64_t s = 0; s < dim; ++s) {
    if (orbit_of_[s] >= 0) continue;
    images.clear();
    std::uint64_t t = s;
    for (int k = 0; k < n_sites; ++k) {
      images.push_back(t);
      images.push_back(reflect(t, n_sites));
      t = rotate(t, n_sites);
    }
    std::sort(images.begin(), images.end());
    images.erase(std::unique(images.begin(), images.end()), images.end());
    const int id = static_cast<int>(representatives_.size());
    for (std::uint64_t x : images) orbit_of_[x] = id;
    representatives_.push_back(images.front());
    orbit_sizes_.push_back(static_cast<int>(images.size()));
  }
}

RealMatrix SymmetricBasis::project(const SpinHamiltonian& h) const {
  QPREP_REQUIRE(h.n_sites() == n_sites_, "SymmetricBasis::project: size mismatch");
  QPREP_REQUIRE(h.is_real(), "SymmetricBasis::project: operator must be real");
  const auto d = static_cast<Eigen::Index>(dimension());
  RealMatrix m = RealMatrix::Zero(d, d);
  // <r_a|H|r_b> = sqrt(|O_b| / |O_a|) sum_{s in O_a} H_{s, rep_b}
  for (Eigen::Index b = 0; b < d; ++b) {
    const std::uint64_t rep = representatives_[static_cast<std::size_t>(b)];
    for (const auto& t : h.terms()) {
      const std::uint64_t s = rep ^ t.flip_mask();
      const auto a = static_cast<Eigen::Index>(orbit_of_[s]);
      const double scale = std::sqrt(static_cast<double>(orbit_sizes_[static_cast<std::size_t>(b)]) /
                                     orbit_sizes_[static_cast<std::size_t>(a)]);
      m(a, b) += scale * t.amplitude(rep).real();
    }
  }
  return 0.5 * (m + m.transpose());
}

RealVector sector_spectrum(const SpinHamiltonian& h, ShellSector sector, int cap) {
  if (h.n_sites() > cap) {
    throw CapacityError("sector_spectrum: L=" + std::to_string(h.n_sites()) + " exceeds the cap " +
                        std::to_string(cap));
  }
  RealMatrix m;
  if (sector == ShellSector::Full) {
    QPREP_REQUIRE(h.n_sites() <= 14, "sector_spectrum: full-spectrum counting limited to L <= 14");
    m = h.dense_real();
  } else {
    m = SymmetricBasis(h.n_sites()).project(h);
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("sector_spectrum: eigensolver failed");
  return eig.eigenvalues();
}

long count_in_shell(const RealVector& spectrum, double e_hi, double width, int n_sites) {
  QPREP_REQUIRE(width > 0.0, "shell width must be positive");
  const double lo = std::isinf(width) ? -std::numeric_limits<double>::infinity() : e_hi - width * n_sites;
  long count = 0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    if (spectrum[i] >= lo && spectrum[i] <= e_hi) ++count;
  }
  return count;
}

long shell_dimension(const SpinHamiltonian& h, double e_hi, double width, ShellSector sector, int cap) {
  return count_in_shell(sector_spectrum(h, sector, cap), e_hi, width, h.n_sites());
}

}  // namespace qprep::pauli
