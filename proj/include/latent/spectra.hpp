#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "latent/digraph.hpp"
#include "latent/matrix.hpp"

namespace latent {

/// Index of a square matrix: the smallest k with rank A^{k+1} = rank A^k,
/// with A^0 = I. `rank_sequence` holds ranks of A^0 .. A^{nu+1}.
struct IndexResult {
  int nu = 0;
  std::vector<Index> rank_sequence;
};

enum class ProjectionMethod { algebraic, resolvent_limit, forest_oracle };

std::string_view to_string(ProjectionMethod method);

/// Eigenprojection at eigenvalue 0 together with how it was obtained and
/// how well it satisfies the defining conditions.
struct Eigenprojection {
  SquareMatrix matrix;
  ProjectionMethod method;
  // max|Z^2 - Z|
  double idempotency_residual = 0.0;
  // max(max|Z A^nu|, max|A^nu Z|)
  double commutation_residual = 0.0;
  // Condition number of the [null-basis range-basis] assembly (algebraic
  // method only; 1 otherwise).
  double condition_number = 1.0;
  // Resolvent method: max|R(tau_{k+1}) - R(tau_k)| along the schedule.
  std::vector<double> successive_differences;
  bool converged = true;
};

// Numerical rank with tolerance n * eps * sigma_max.
Index numerical_rank(const Matrix& m);

IndexResult matrix_index(const SquareMatrix& m);

/// The unique idempotent Z with range N(A^nu) and null space R(A^nu).
///
/// Built from orthonormal bases U of N(A^nu) and V of R(A^nu) taken from
/// an SVD of A^nu: with M = [U V], Z = U * (first dim U rows of M^{-1}).
/// Throws NumericalError when M is too ill-conditioned to invert
/// (condition number above 1e12).
Eigenprojection eigenprojection(const SquareMatrix& m);
Eigenprojection eigenprojection(const LaplacianMatrix& l);

// Packages an externally computed projection with residuals against A.
Eigenprojection annotate_projection(SquareMatrix z, ProjectionMethod method, const SquareMatrix& a);

// {1e0, 1e1, ..., 1e8}
std::vector<double> default_tau_schedule();

// (I + tau_max L)^{-1}; `converged` is false when the last successive
// difference exceeds 1e-6. The schedule must be nonempty, positive and
// strictly increasing.
Eigenprojection eigenprojection_resolvent(const LaplacianMatrix& l,
                                          std::span<const double> tau_schedule);
Eigenprojection eigenprojection_resolvent(const LaplacianMatrix& l);

// e^{m t}. Throws NumericalError on overflow.
SquareMatrix matrix_exponential(const SquareMatrix& m, double t);

/// lim e^{-Lt}, approached by doubling t from 1 until successive
/// exponentials differ by less than 1e-12 (t capped at 2^60).
struct ExponentialLimit {
  SquareMatrix matrix;
  double t = 0.0;
  bool converged = false;
};
ExponentialLimit exponential_limit(const LaplacianMatrix& l);

// Throws PreconditionError unless AC = A and C^2 = C hold within 1e-10
// (scaled by max(1, max|A|) and max(1, max|C|) respectively).
void require_conforming_pair(const SquareMatrix& a, const SquareMatrix& c);

// max| e^{-(A+dC)t} - [I + (A+dC)(A+dI)^{-1}(e^{-(A+dI)t} - I)] |
double exp_regularization_identity_residual(const SquareMatrix& a, const SquareMatrix& c,
                                            double delta, double t);

// max| (A+dC)^m - (A+dC)(A+dI)^{m-1} |
double power_monomial_identity_residual(const SquareMatrix& a, const SquareMatrix& c,
                                        double delta, int m);

}  // namespace latent
