#include "qprep/oracle/dense_spin.hpp"

#include "qprep/core/error.hpp"

namespace qprep::oracle {

ComplexMatrix site_matrix(SiteOp op) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  switch (op) {
    case SiteOp::Identity: m(0, 0) = m(1, 1) = 1.0; break;
    case SiteOp::X: m(0, 1) = m(1, 0) = 1.0; break;
    // <up|Y|down> = -i, <down|Y|up> = +i
    case SiteOp::Y: m(1, 0) = cplx{0.0, -1.0}; m(0, 1) = cplx{0.0, 1.0}; break;
    case SiteOp::Z: m(0, 0) = -1.0; m(1, 1) = 1.0; break;
    case SiteOp::Plus: m(1, 0) = 1.0; break;
    case SiteOp::Minus: m(0, 1) = 1.0; break;
  }
  return m;
}

ComplexMatrix kron_chain(const std::vector<SiteOp>& ops) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  // the highest site is the most significant factor
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    const ComplexMatrix s = site_matrix(*it);
    ComplexMatrix next(out.rows() * 2, out.cols() * 2);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) next.block(a * out.rows(), b * out.cols(), out.rows(), out.cols()) = s(a, b) * out;
    }
    out = std::move(next);
  }
  return out;
}

ComplexMatrix kron_pauli(const pauli::PauliString& p, int n_sites) {
  std::vector<SiteOp> ops(static_cast<std::size_t>(n_sites), SiteOp::Identity);
  for (const auto& f : p.factors()) {
    ops[static_cast<std::size_t>(f.site)] =
        f.axis == pauli::Axis::X ? SiteOp::X : (f.axis == pauli::Axis::Y ? SiteOp::Y : SiteOp::Z);
  }
  return p.coefficient() * kron_chain(ops);
}

ComplexMatrix kron_hamiltonian(const pauli::SpinHamiltonian& h) {
  const Eigen::Index dim = Eigen::Index{1} << h.n_sites();
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (const auto& t : h.terms()) out += kron_pauli(t, h.n_sites());
  return out;
}

ComplexMatrix spin_hop(int n_sites, int i, int j) {
  QPREP_REQUIRE(i != j, "spin_hop: sites must differ");
  std::vector<SiteOp> ops(static_cast<std::size_t>(n_sites), SiteOp::Identity);
  ops[static_cast<std::size_t>(i)] = SiteOp::Plus;
  ops[static_cast<std::size_t>(j)] = SiteOp::Minus;
  return kron_chain(ops);
}

ComplexMatrix gamma_operator(int n_sites, int n) {
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (int l = 0; l < n_sites; ++l) {
    const int r = (l + n) % n_sites;
    out += spin_hop(n_sites, l, r) + spin_hop(n_sites, r, l);
  }
  return out / static_cast<double>(n_sites);
}

ComplexMatrix trace_out(const ComplexMatrix& rho, int n_sites, int first, int length) {
  const int outside = n_sites - length;
  const Eigen::Index da = Eigen::Index{1} << length;
  ComplexMatrix out = ComplexMatrix::Zero(da, da);
  for (long env = 0; env < (1L << outside); ++env) {
    // low env bits fill sites below the block, high bits the sites above it
    const long low = env & ((1L << first) - 1);
    const long high = env >> first;
    for (long a = 0; a < da; ++a) {
      for (long b = 0; b < da; ++b) {
        const long ia = low | (a << first) | (high << (first + length));
        const long ib = low | (b << first) | (high << (first + length));
        out(a, b) += rho(ia, ib);
      }
    }
  }
  return out;
}

}  // namespace qprep::oracle
