#pragma once

#include "latent/digraph.hpp"
#include "latent/matrix.hpp"
#include "latent/report.hpp"

namespace latent {

/// T = { x : Jbar x is a constant vector }, the initial states from which
/// the unregularized protocol reaches consensus. Columns of `basis` are
/// orthonormal.
struct ConsensusSubspace {
  Matrix basis;

  Index dim() const noexcept { return basis.cols(); }
};

// Jbar must be idempotent and row-stochastic (tol 1e-9). The basis spans
// the null space of (I - E) Jbar, where E averages a vector; singular
// values below 1e-9 * max(1, sigma_max) count as zero.
ConsensusSubspace consensus_subspace(const SquareMatrix& jbar);

// S = B B^T.
SquareMatrix orthogonal_projector(const ConsensusSubspace& t);

// Weights are row 0 of Jbar S. "row_spread" records how far the other rows
// are from it; value is left empty when that exceeds 1e-10.
ConsensusReport orthoproj_consensus(const LaplacianMatrix& l, const Vector& x0);

}  // namespace latent
