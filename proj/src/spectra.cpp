#include "latent/spectra.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "latent/error.hpp"
#include "latent/forests.hpp"

namespace latent {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kMaxAssemblyCondition = 1e12;

Index rank_from_singular_values(const Vector& sv, Index n) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double tol = static_cast<double>(n) * kEps * sv(0);
  Index r = 0;
  while (r < sv.size() && sv(r) > tol) ++r;
  return r;
}

Matrix matrix_power(const Matrix& a, int k) {
  Matrix p = Matrix::Identity(a.rows(), a.cols());
  for (int i = 0; i < k; ++i) p = p * a;
  return p;
}

void require_same_order(const SquareMatrix& a, const SquareMatrix& c) {
  if (a.order() != c.order()) {
    throw InvalidArgument("matrix pair has mismatched orders " + std::to_string(a.order()) +
                          " and " + std::to_string(c.order()));
  }
}

void require_positive_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw InvalidArgument("delta must be finite and positive");
  }
}

}  // namespace

std::string_view to_string(ProjectionMethod method) {
  switch (method) {
    case ProjectionMethod::algebraic:
      return "algebraic";
    case ProjectionMethod::resolvent_limit:
      return "resolvent";
    case ProjectionMethod::forest_oracle:
      return "forest";
  }
  return "unknown";
}

Index numerical_rank(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return rank_from_singular_values(svd.singularValues(), std::max(m.rows(), m.cols()));
}

IndexResult matrix_index(const SquareMatrix& m) {
  const Matrix& a = m.values();
  const Index n = m.order();
  IndexResult result;
  Matrix power = Matrix::Identity(n, n);
  result.rank_sequence.push_back(n);
  for (int k = 0; k <= n; ++k) {
    power = power * a;
    const Index next = numerical_rank(power);
    result.rank_sequence.push_back(next);
    if (next == result.rank_sequence[static_cast<std::size_t>(k)]) {
      result.nu = k;
      return result;
    }
  }
  // Unreachable: the rank sequence is nonincreasing and bounded by n.
  throw NumericalError("matrix index did not stabilize");
}

Eigenprojection annotate_projection(SquareMatrix z, ProjectionMethod method,
                                    const SquareMatrix& a) {
  const IndexResult idx = matrix_index(a);
  const Matrix power = matrix_power(a.values(), idx.nu);
  const Matrix& zv = z.values();
  Eigenprojection ep{std::move(z), method};
  ep.idempotency_residual = max_abs_diff(zv * zv, zv);
  ep.commutation_residual = std::max(max_abs(zv * power), max_abs(power * zv));
  return ep;
}

Eigenprojection eigenprojection(const SquareMatrix& m) {
  const Index n = m.order();
  const IndexResult idx = matrix_index(m);
  const Matrix power = matrix_power(m.values(), idx.nu);

  Eigen::JacobiSVD<Matrix> svd(power, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Index r = rank_from_singular_values(svd.singularValues(), n);
  const Index k = n - r;

  Matrix z;
  double cond = 1.0;
  if (k == 0) {
    z = Matrix::Zero(n, n);
  } else if (r == 0) {
    z = Matrix::Identity(n, n);
  } else {
    Matrix basis(n, n);
    basis.leftCols(k) = svd.matrixV().rightCols(k);
    basis.rightCols(r) = svd.matrixU().leftCols(r);
    Eigen::JacobiSVD<Matrix> basis_svd(basis);
    const Vector& sv = basis_svd.singularValues();
    cond = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
    if (!(cond <= kMaxAssemblyCondition)) {
      std::ostringstream msg;
      msg << "eigenprojection: null/range basis assembly is numerically degenerate (condition "
             "number "
          << cond << ")";
      throw NumericalError(msg.str());
    }
    const Matrix inv = Eigen::PartialPivLU<Matrix>(basis).inverse();
    z = basis.leftCols(k) * inv.topRows(k);
  }

  Eigenprojection ep{SquareMatrix(std::move(z)), ProjectionMethod::algebraic};
  const Matrix& zv = ep.matrix.values();
  ep.idempotency_residual = max_abs_diff(zv * zv, zv);
  ep.commutation_residual = std::max(max_abs(zv * power), max_abs(power * zv));
  ep.condition_number = cond;
  return ep;
}

Eigenprojection eigenprojection(const LaplacianMatrix& l) { return eigenprojection(l.matrix()); }

std::vector<double> default_tau_schedule() {
  std::vector<double> taus;
  for (int e = 0; e <= 8; ++e) taus.push_back(std::pow(10.0, e));
  return taus;
}

Eigenprojection eigenprojection_resolvent(const LaplacianMatrix& l,
                                          std::span<const double> tau_schedule) {
  if (tau_schedule.empty()) throw InvalidArgument("tau schedule is empty");
  for (std::size_t i = 0; i < tau_schedule.size(); ++i) {
    if (!(tau_schedule[i] > 0.0)) throw InvalidArgument("tau schedule must be positive");
    if (i > 0 && !(tau_schedule[i] > tau_schedule[i - 1])) {
      throw InvalidArgument("tau schedule must be strictly increasing");
    }
  }
  std::vector<double> diffs;
  SquareMatrix current = parametric_forest_matrix(l, tau_schedule[0]);
  for (std::size_t i = 1; i < tau_schedule.size(); ++i) {
    SquareMatrix next = parametric_forest_matrix(l, tau_schedule[i]);
    diffs.push_back(max_abs_diff(next.values(), current.values()));
    current = std::move(next);
  }
  Eigenprojection ep =
      annotate_projection(std::move(current), ProjectionMethod::resolvent_limit, l.matrix());
  ep.converged = diffs.empty() || diffs.back() <= 1e-6;
  ep.successive_differences = std::move(diffs);
  return ep;
}

Eigenprojection eigenprojection_resolvent(const LaplacianMatrix& l) {
  const auto taus = default_tau_schedule();
  return eigenprojection_resolvent(l, taus);
}

SquareMatrix matrix_exponential(const SquareMatrix& m, double t) {
  if (!std::isfinite(t)) throw InvalidArgument("matrix exponential: t must be finite");
  const Matrix scaled = m.values() * t;
  if (!scaled.allFinite()) throw NumericalError("matrix exponential: m*t overflows");
  Matrix e = scaled.exp();
  if (!e.allFinite()) {
    std::ostringstream msg;
    msg << "matrix exponential overflow: ||m t||_1 = " << scaled.cwiseAbs().colwise().sum().maxCoeff();
    throw NumericalError(msg.str());
  }
  return SquareMatrix(std::move(e));
}

ExponentialLimit exponential_limit(const LaplacianMatrix& l) {
  constexpr double kMaxTime = 1152921504606846976.0;  // 2^60
  const SquareMatrix negated(-l.values());
  ExponentialLimit lim{matrix_exponential(negated, 1.0), 1.0};
  while (lim.t < kMaxTime) {
    SquareMatrix next = matrix_exponential(negated, 2.0 * lim.t);
    const double diff = max_abs_diff(next.values(), lim.matrix.values());
    lim.t *= 2.0;
    lim.matrix = std::move(next);
    if (diff < 1e-12) {
      lim.converged = true;
      break;
    }
  }
  return lim;
}

void require_conforming_pair(const SquareMatrix& a, const SquareMatrix& c) {
  require_same_order(a, c);
  const Matrix& av = a.values();
  const Matrix& cv = c.values();
  const double ac = max_abs_diff(av * cv, av);
  if (ac > 1e-10 * std::max(1.0, max_abs(av))) {
    std::ostringstream msg;
    msg << "precondition AC = A violated: max|AC - A| = " << ac;
    throw PreconditionError(msg.str(), ac);
  }
  const double cc = max_abs_diff(cv * cv, cv);
  if (cc > 1e-10 * std::max(1.0, max_abs(cv))) {
    std::ostringstream msg;
    msg << "precondition C^2 = C violated: max|C^2 - C| = " << cc;
    throw PreconditionError(msg.str(), cc);
  }
}

double exp_regularization_identity_residual(const SquareMatrix& a, const SquareMatrix& c,
                                            double delta, double t) {
  require_conforming_pair(a, c);
  require_positive_delta(delta);
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("t must be finite and positive");

  const Index n = a.order();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix regularized = a.values() + delta * c.values();
  const Matrix shifted = a.values() + delta * id;
  Eigen::FullPivLU<Matrix> lu(shifted);
  if (!lu.isInvertible()) throw PreconditionError("A + delta I is singular", 0.0);

  const Matrix lhs = matrix_exponential(SquareMatrix(regularized), -t).values();
  const Matrix shifted_exp = matrix_exponential(SquareMatrix(shifted), -t).values();
  const Matrix rhs = id + regularized * lu.inverse() * (shifted_exp - id);
  return max_abs_diff(lhs, rhs);
}

double power_monomial_identity_residual(const SquareMatrix& a, const SquareMatrix& c,
                                        double delta, int m) {
  require_conforming_pair(a, c);
  if (!std::isfinite(delta)) throw InvalidArgument("delta must be finite");
  if (m < 1) throw InvalidArgument("monomial degree must be positive");

  const Index n = a.order();
  const Matrix regularized = a.values() + delta * c.values();
  const Matrix shifted = a.values() + delta * Matrix::Identity(n, n);
  Matrix lhs = regularized;
  for (int i = 1; i < m; ++i) lhs = lhs * regularized;
  const Matrix rhs = regularized * matrix_power(shifted, m - 1);
  return max_abs_diff(lhs, rhs);
}

}  // namespace latent
