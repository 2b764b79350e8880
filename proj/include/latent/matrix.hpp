#pragma once

#include <Eigen/Dense>

namespace latent {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense real square matrix of positive order with finite entries.
///
/// This is the carrier for Laplacians, projections, resolvents and the
/// regularized system matrices. Construction validates shape and
/// finiteness; afterwards the value is immutable.
class SquareMatrix {
 public:
  explicit SquareMatrix(Matrix values);

  static SquareMatrix identity(Index order);
  static SquareMatrix zero(Index order);

  Index order() const noexcept { return values_.rows(); }
  const Matrix& values() const noexcept { return values_; }
  double operator()(Index row, Index col) const { return values_(row, col); }

  friend bool operator==(const SquareMatrix& a, const SquareMatrix& b) {
    return a.values_ == b.values_;
  }

 private:
  Matrix values_;
};

/// Row-stochastic matrix: nonnegative entries, every row sums to 1 (tol 1e-12).
class StochasticMatrix {
 public:
  const SquareMatrix& matrix() const noexcept { return matrix_; }
  const Matrix& values() const noexcept { return matrix_.values(); }
  Index order() const noexcept { return matrix_.order(); }

 private:
  explicit StochasticMatrix(SquareMatrix m) : matrix_(std::move(m)) {}
  friend StochasticMatrix validate_stochastic(SquareMatrix m);

  SquareMatrix matrix_;
};

// Throws InvalidArgument naming the first offending row or entry.
StochasticMatrix validate_stochastic(SquareMatrix m);

// Entrywise max norm.
double max_abs(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);

// Largest entrywise deviation of any row from row 0.
double row_spread(const Matrix& m);

// Matrix with `rows` bitwise-identical copies of `row`.
Matrix replicate_row(const Vector& row, Index rows);

// Column sums as a vector.
Vector column_sums(const Matrix& m);

}  // namespace latent
