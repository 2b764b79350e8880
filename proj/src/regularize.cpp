#include "latent/regularize.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "latent/error.hpp"
#include "latent/spectra.hpp"

namespace latent {

namespace {

void require_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw InvalidArgument("delta must be finite and positive");
  }
}

void require_discrete_delta(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("discrete delta must lie in (0, 1]");
}

void require_length(const Vector& v, Index n, std::string_view name) {
  if (v.size() != n) {
    std::ostringstream msg;
    msg << name << " has length " << v.size() << ", expected " << n;
    throw InvalidArgument(msg.str());
  }
  if (!v.allFinite()) throw InvalidArgument(std::string(name) + " has non-finite entries");
}

// x^T M^{-1} for M = I + scale * K.
Vector resolvent_row(const Matrix& k, double scale, const Vector& x) {
  const Index n = k.rows();
  const Matrix m = Matrix::Identity(n, n) + scale * k;
  Vector row = Eigen::PartialPivLU<Matrix>(m.transpose()).solve(x);
  if (!row.allFinite()) throw NumericalError("internal inversion error in resolvent");
  return row;
}

Vector with_hub(const Vector& agents, double hub) {
  Vector row(agents.size() + 1);
  row.head(agents.size()) = agents;
  row(agents.size()) = hub;
  return row;
}

SquareMatrix rank_one(const Vector& row) {
  return SquareMatrix(replicate_row(row, row.size()));
}

}  // namespace

Vector uniform_distribution(Index n) {
  return Vector::Constant(n, 1.0 / static_cast<double>(n));
}

void require_distribution(const Vector& v, std::string_view name) {
  if (v.size() == 0) throw InvalidArgument(std::string(name) + " is empty");
  if (!v.allFinite()) throw InvalidArgument(std::string(name) + " has non-finite entries");
  if ((v.array() < 0.0).any()) throw InvalidArgument(std::string(name) + " has negative entries");
  const double sum = v.sum();
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << name << " must sum to 1, sums to " << sum;
    throw InvalidArgument(msg.str());
  }
}

HubAugmentation make_hub(const LaplacianMatrix& base, double delta, Vector v) {
  require_delta(delta);
  require_length(v, base.order(), "v");
  if ((v.array() < 0.0).any()) throw InvalidArgument("hub strengths v must be nonnegative");
  return HubAugmentation{base, delta, std::move(v)};
}

BackgroundAugmentation make_background(const LaplacianMatrix& base, double delta, Vector v) {
  require_delta(delta);
  require_length(v, base.order(), "v");
  require_distribution(v, "v");
  return BackgroundAugmentation{base, delta, std::move(v)};
}

LaplacianMatrix hub_augment(const HubAugmentation& h) {
  const Index n = h.base.order();
  Matrix m = Matrix::Zero(n + 1, n + 1);
  m.topLeftCorner(n, n) = h.base.values() + h.delta * Matrix::Identity(n, n);
  m.topRightCorner(n, 1).setConstant(-h.delta);
  m.bottomLeftCorner(1, n) = -h.v.transpose();
  m(n, n) = h.s();
  return validate_laplacian(SquareMatrix(std::move(m)));
}

SquareMatrix hub_eigenprojection(const HubAugmentation& h) {
  const Index n = h.base.order();
  const double inv_delta = 1.0 / h.delta;
  if ((h.v.array() == h.delta).all()) {
    const double w = 1.0 / static_cast<double>(n + 1);
    const Vector agents = resolvent_row(h.base.values(), inv_delta, Vector::Ones(n)) * w;
    return rank_one(with_hub(agents, w));
  }
  const double total = h.s() + h.delta;
  const Vector agents = resolvent_row(h.base.values(), inv_delta, h.v) / total;
  return rank_one(with_hub(agents, h.delta / total));
}

SquareMatrix symmetric_hub_limit(const LaplacianMatrix& l) {
  const Index n = l.order();
  const double w = 1.0 / static_cast<double>(n + 1);
  const Matrix jbar = eigenprojection(l).matrix.values();
  return rank_one(with_hub(column_sums(jbar) * w, w));
}

SquareMatrix subordinate_hub_limit(const LaplacianMatrix& l, const Vector& vtilde) {
  require_length(vtilde, l.order(), "vtilde");
  require_distribution(vtilde, "vtilde");
  const Matrix jbar = eigenprojection(l).matrix.values();
  return rank_one(with_hub(jbar.transpose() * vtilde, 0.0));
}

Vector subordinate_hub_strengths(const Vector& vtilde, double delta) {
  require_delta(delta);
  return std::sqrt(delta) * vtilde;
}

LaplacianMatrix background_laplacian(const BackgroundAugmentation& b) {
  const Index n = b.base.order();
  const Matrix d = Matrix::Identity(n, n) - Vector::Ones(n) * b.v.transpose();
  return validate_laplacian(SquareMatrix(b.base.values() + b.delta * d));
}

SquareMatrix background_eigenprojection(const BackgroundAugmentation& b) {
  return rank_one(resolvent_row(b.base.values(), 1.0 / b.delta, b.v));
}

SquareMatrix background_limit(const LaplacianMatrix& l, const Vector& v) {
  require_length(v, l.order(), "v");
  require_distribution(v, "v");
  const Matrix jbar = eigenprojection(l).matrix.values();
  return rank_one(jbar.transpose() * v);
}

DiscreteRegularization make_discrete(const StochasticMatrix& p, double delta, Vector v) {
  require_discrete_delta(delta);
  require_length(v, p.order(), "v");
  require_distribution(v, "v");
  return DiscreteRegularization{p, delta, std::move(v)};
}

StochasticMatrix degroot_hub_matrix(const DiscreteRegularization& d) {
  if ((d.v.array() <= 0.0).any()) {
    throw InvalidArgument(
        "degroot-hub needs every v_i > 0: with a zero entry the regularized matrix is not "
        "guaranteed regular");
  }
  const Index n = d.p.order();
  Matrix q = Matrix::Zero(n + 1, n + 1);
  q.topLeftCorner(n, n) = (1.0 - d.delta) * d.p.values();
  q.topRightCorner(n, 1).setConstant(d.delta);
  q.bottomLeftCorner(1, n) = d.v.transpose();
  return validate_stochastic(SquareMatrix(std::move(q)));
}

SquareMatrix degroot_hub_eigenprojection(const DiscreteRegularization& d) {
  const Index n = d.p.order();
  const Matrix k = Matrix::Identity(n, n) - d.p.values();
  const double total = 1.0 + d.delta;
  const Vector agents = resolvent_row(k, d.gamma(), d.v) / total;
  return rank_one(with_hub(agents, d.delta / total));
}

SquareMatrix degroot_hub_limit(const StochasticMatrix& p, const Vector& v) {
  require_length(v, p.order(), "v");
  require_distribution(v, "v");
  const Matrix jbar = eigenprojection(laplacian_of(p)).matrix.values();
  return rank_one(with_hub(jbar.transpose() * v, 0.0));
}

StochasticMatrix pagerank_matrix(const DiscreteRegularization& d) {
  const Index n = d.p.order();
  Matrix m = (1.0 - d.delta) * d.p.values() + d.delta * Vector::Ones(n) * d.v.transpose();
  return validate_stochastic(SquareMatrix(std::move(m)));
}

SquareMatrix pagerank_eigenprojection(const DiscreteRegularization& d) {
  const Index n = d.p.order();
  const Matrix k = Matrix::Identity(n, n) - d.p.values();
  return rank_one(resolvent_row(k, d.gamma(), d.v));
}

SquareMatrix pagerank_limit(const StochasticMatrix& p, const Vector& v) {
  require_length(v, p.order(), "v");
  require_distribution(v, "v");
  const Matrix jbar = eigenprojection(laplacian_of(p)).matrix.values();
  return rank_one(jbar.transpose() * v);
}

LaplacianMatrix laplacian_of(const StochasticMatrix& p) {
  const Index n = p.order();
  Matrix l = Matrix::Identity(n, n) - p.values();
  // Recompute the diagonal from the off-diagonal entries so rows sum to 0
  // to working precision.
  for (Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j != i) off += l(i, j);
    }
    l(i, i) = -off;
  }
  return validate_laplacian(SquareMatrix(std::move(l)));
}

ConformingPair hub_pair(const LaplacianMatrix& l, const Vector& v) {
  const Index n = l.order();
  require_length(v, n, "v");
  Matrix a = Matrix::Zero(n + 1, n + 1);
  a.topLeftCorner(n, n) = l.values();
  a.bottomLeftCorner(1, n) = -v.transpose();
  a(n, n) = v.sum();
  Matrix c = Matrix::Zero(n + 1, n + 1);
  c.topLeftCorner(n, n).setIdentity();
  c.topRightCorner(n, 1).setConstant(-1.0);
  return ConformingPair{SquareMatrix(std::move(a)), SquareMatrix(std::move(c))};
}

ConformingPair background_pair(const LaplacianMatrix& l, const Vector& v) {
  const Index n = l.order();
  require_length(v, n, "v");
  require_distribution(v, "v");
  return ConformingPair{l.matrix(), SquareMatrix(Matrix::Identity(n, n) -
                                                 Vector::Ones(n) * v.transpose())};
}

double laplacian_pair_identity_residual(const LaplacianMatrix& a, const LaplacianMatrix& c,
                                        double delta) {
  require_conforming_pair(a.matrix(), c.matrix());
  require_delta(delta);
  const Index n = a.order();
  const Matrix id = Matrix::Identity(n, n);
  const Eigenprojection z = eigenprojection(SquareMatrix(a.values() + delta * c.values()));
  const Matrix closed =
      (id - c.values()) * Eigen::PartialPivLU<Matrix>(id + a.values() / delta).inverse();
  return max_abs_diff(z.matrix.values(), closed);
}

// ---------------------------------------------------------------------------

std::string_view to_string(Method m) {
  switch (m) {
    case Method::hub_symmetric:
      return "hub-symmetric";
    case Method::hub_subordinate:
      return "hub-subordinate";
    case Method::background:
      return "background";
    case Method::degroot_hub:
      return "degroot-hub";
    case Method::pagerank:
      return "pagerank";
    case Method::orthoproj:
      return "orthoproj";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::hub_symmetric, Method::hub_subordinate, Method::background,
                   Method::degroot_hub, Method::pagerank, Method::orthoproj}) {
    if (to_string(m) == name) return m;
  }
  throw ParseError("unknown method \"" + std::string(name) + "\"");
}

bool is_discrete(Method m) { return m == Method::degroot_hub || m == Method::pagerank; }

bool has_hub(Method m) {
  return m == Method::hub_symmetric || m == Method::hub_subordinate || m == Method::degroot_hub;
}

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::optional<Vector> optional_vector(const json& doc, const char* key) {
  if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
  const json& arr = doc[key];
  if (!arr.is_array()) throw ParseError(std::string("spec JSON: \"") + key + "\" must be an array");
  Vector v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      throw ParseError(std::string("spec JSON: \"") + key + "\" entries must be numbers");
    }
    v(static_cast<Index>(i)) = arr[i].get<double>();
  }
  return v;
}

ordered_json vector_json(const std::optional<Vector>& v) {
  if (!v) return nullptr;
  ordered_json arr = ordered_json::array();
  for (Index i = 0; i < v->size(); ++i) arr.push_back((*v)(i));
  return arr;
}

}  // namespace

RegularizationSpec parse_regularization_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("spec JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("spec JSON: top level must be an object");
  if (!doc.contains("method") || !doc["method"].is_string()) {
    throw ParseError("spec JSON: \"method\" must be a string");
  }
  RegularizationSpec spec;
  spec.method = parse_method(doc["method"].get<std::string>());
  if (doc.contains("delta") && !doc["delta"].is_null()) {
    if (!doc["delta"].is_number()) throw ParseError("spec JSON: \"delta\" must be a number");
    const double delta = doc["delta"].get<double>();
    if (!(delta > 0.0) || !std::isfinite(delta)) {
      throw ParseError("spec JSON: \"delta\" must be positive and finite");
    }
    spec.delta = delta;
  }
  spec.v = optional_vector(doc, "v");
  spec.vtilde = optional_vector(doc, "vtilde");
  return spec;
}

std::string serialize_regularization_spec(const RegularizationSpec& spec) {
  ordered_json doc;
  doc["method"] = std::string(to_string(spec.method));
  doc["delta"] = spec.delta ? ordered_json(*spec.delta) : ordered_json(nullptr);
  doc["v"] = vector_json(spec.v);
  doc["vtilde"] = vector_json(spec.vtilde);
  return doc.dump();
}

}  // namespace latent
