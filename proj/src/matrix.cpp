#include "latent/matrix.hpp"

#include <cmath>
#include <sstream>

#include "latent/error.hpp"

namespace latent {

SquareMatrix::SquareMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.rows() != values_.cols()) {
    std::ostringstream msg;
    msg << "square matrix of positive order required, got " << values_.rows() << "x"
        << values_.cols();
    throw InvalidArgument(msg.str());
  }
  if (!values_.allFinite()) throw InvalidArgument("matrix has non-finite entries");
}

SquareMatrix SquareMatrix::identity(Index order) {
  return SquareMatrix(Matrix::Identity(order, order));
}

SquareMatrix SquareMatrix::zero(Index order) { return SquareMatrix(Matrix::Zero(order, order)); }

StochasticMatrix validate_stochastic(SquareMatrix m) {
  const Matrix& p = m.values();
  for (Index i = 0; i < p.rows(); ++i) {
    for (Index j = 0; j < p.cols(); ++j) {
      if (p(i, j) < 0.0) {
        std::ostringstream msg;
        msg << "not stochastic: negative entry " << p(i, j) << " at (" << i + 1 << "," << j + 1
            << ")";
        throw InvalidArgument(msg.str());
      }
    }
    const double sum = p.row(i).sum();
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "not stochastic: row " << i + 1 << " sums to " << sum;
      throw InvalidArgument(msg.str());
    }
  }
  return StochasticMatrix(std::move(m));
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double max_abs_diff(const Matrix& a, const Matrix& b) { return max_abs(a - b); }

double row_spread(const Matrix& m) {
  double spread = 0.0;
  for (Index i = 1; i < m.rows(); ++i) {
    spread = std::max(spread, (m.row(i) - m.row(0)).cwiseAbs().maxCoeff());
  }
  return spread;
}

Matrix replicate_row(const Vector& row, Index rows) {
  Matrix out(rows, row.size());
  for (Index i = 0; i < rows; ++i) out.row(i) = row.transpose();
  return out;
}

Vector column_sums(const Matrix& m) { return m.colwise().sum().transpose(); }

}  // namespace latent
