#pragma once

#include "qprep/pauli/state_vector.hpp"

namespace qprep::pauli {

/// Contiguous run of sites [first, first + length), no wrap-around.
struct SiteBlock {
  int first = 0;
  int length = 1;
};

void validate_block(SiteBlock block, int n_sites);

/// Tr_{complement}|psi><psi| on the block. Row/column index bit j is site
/// first + j (same bit convention as the full basis).
ComplexMatrix reduced_density(const StateVector& psi, SiteBlock block, int max_length = 8);

/// Partial trace of a full 2^L density matrix onto the block.
ComplexMatrix partial_trace(const ComplexMatrix& rho, int n_sites, SiteBlock block);

}  // namespace qprep::pauli
