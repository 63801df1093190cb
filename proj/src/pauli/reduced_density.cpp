#include "qprep/pauli/reduced_density.hpp"

#include "qprep/core/error.hpp"

namespace qprep::pauli {

void validate_block(SiteBlock block, int n_sites) {
  QPREP_REQUIRE(block.length >= 1, "block length must be positive");
  QPREP_REQUIRE(block.first >= 0 && block.first + block.length <= n_sites,
                "block must be a contiguous range inside [0, L)");
}

namespace {

struct BlockIndexer {
  int first;
  int length;
  std::uint64_t block_mask;
  std::uint64_t low_mask;

  BlockIndexer(SiteBlock b)
      : first(b.first),
        length(b.length),
        block_mask((std::uint64_t{1} << b.length) - 1),
        low_mask((std::uint64_t{1} << b.first) - 1) {}

  std::uint64_t local(std::uint64_t index) const { return (index >> first) & block_mask; }
  std::uint64_t environment(std::uint64_t index) const {
    return (index & low_mask) | ((index >> (first + length)) << first);
  }
  std::uint64_t compose(std::uint64_t a, std::uint64_t env) const {
    return (env & low_mask) | (a << first) | ((env >> first) << (first + length));
  }
};

}  // namespace

ComplexMatrix reduced_density(const StateVector& psi, SiteBlock block, int max_length) {
  validate_block(block, psi.n_sites());
  QPREP_REQUIRE(block.length <= max_length, "reduced_density: block longer than the configured cap");
  const BlockIndexer ix(block);
  const Eigen::Index da = Eigen::Index{1} << block.length;
  const Eigen::Index de = Eigen::Index{1} << (psi.n_sites() - block.length);
  ComplexMatrix m(da, de);
  const auto& amp = psi.amplitudes();
  for (Eigen::Index b = 0; b < amp.size(); ++b) {
    const auto u = static_cast<std::uint64_t>(b);
    m(static_cast<Eigen::Index>(ix.local(u)), static_cast<Eigen::Index>(ix.environment(u))) = amp[b];
  }
  ComplexMatrix rho = m * m.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, int n_sites, SiteBlock block) {
  validate_block(block, n_sites);
  QPREP_REQUIRE(rho.rows() == (Eigen::Index{1} << n_sites) && rho.cols() == rho.rows(),
                "partial_trace: matrix dimension must be 2^L");
  const BlockIndexer ix(block);
  const Eigen::Index da = Eigen::Index{1} << block.length;
  const std::uint64_t de = std::uint64_t{1} << (n_sites - block.length);
  ComplexMatrix out = ComplexMatrix::Zero(da, da);
  for (std::uint64_t env = 0; env < de; ++env) {
    for (Eigen::Index a = 0; a < da; ++a) {
      const auto ra = static_cast<Eigen::Index>(ix.compose(static_cast<std::uint64_t>(a), env));
      for (Eigen::Index c = 0; c < da; ++c) {
        out(a, c) += rho(ra, static_cast<Eigen::Index>(ix.compose(static_cast<std::uint64_t>(c), env)));
      }
    }
  }
  return out;
}

}  // namespace qprep::pauli
