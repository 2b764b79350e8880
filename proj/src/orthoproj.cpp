#include "latent/orthoproj.hpp"

#include "latent/error.hpp"
#include "latent/spectra.hpp"

namespace latent {

ConsensusSubspace consensus_subspace(const SquareMatrix& jbar) {
  const Matrix& j = jbar.values();
  const Index n = jbar.order();
  if (max_abs_diff(j * j, j) > 1e-9) throw InvalidArgument("Jbar is not idempotent");
  if ((j.array() < -1e-9).any() ||
      (j.rowwise().sum().array() - 1.0).abs().maxCoeff() > 1e-9) {
    throw InvalidArgument("Jbar is not row-stochastic");
  }

  const Matrix averaging = Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  const Matrix deviation = (Matrix::Identity(n, n) - averaging) * j;
  Eigen::JacobiSVD<Matrix> svd(deviation, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double tol = 1e-9 * std::max(1.0, sv(0));
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol) ++rank;
  return ConsensusSubspace{svd.matrixV().rightCols(n - rank)};
}

SquareMatrix orthogonal_projector(const ConsensusSubspace& t) {
  return SquareMatrix(t.basis * t.basis.transpose());
}

ConsensusReport orthoproj_consensus(const LaplacianMatrix& l, const Vector& x0) {
  if (x0.size() != l.order()) {
    throw InvalidArgument("x0 has length " + std::to_string(x0.size()) + ", expected " +
                          std::to_string(l.order()));
  }
  const SquareMatrix jbar = eigenprojection(l).matrix;
  const ConsensusSubspace t = consensus_subspace(jbar);
  const Matrix s = orthogonal_projector(t).values();
  const Matrix limit = jbar.values() * s;

  ConsensusReport report;
  report.method = "orthoproj";
  report.weights = limit.row(0).transpose();
  const double spread = row_spread(limit);
  report.diagnostics["row_spread"] = spread;
  report.diagnostics["subspace_dim"] = static_cast<double>(t.dim());
  report.diagnostics["weight_sum_error"] = std::abs(report.weights.sum() - 1.0);
  report.diagnostics["projector_idempotency"] = max_abs_diff(s * s, s);
  if (spread <= 1e-10) report.value = report.weights.dot(x0);
  return report;
}

}  // namespace latent
