#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latent/digraph.hpp"
#include "latent/matrix.hpp"

namespace latent {

// ---------------------------------------------------------------------------
// Continuous families.

/// A hub (vertex n+1) added to a Laplacian system: the hub pulls every agent
/// with strength `delta` and is pulled by agent i with strength v_i.
struct HubAugmentation {
  LaplacianMatrix base;
  double delta;
  Vector v;

  double s() const { return v.sum(); }
};

// Validates delta > 0, v >= 0 and dimensions.
HubAugmentation make_hub(const LaplacianMatrix& base, double delta, Vector v);

/// Complete background digraph added to a Laplacian system:
/// L + delta D with D = I - 1 v^T and v a distribution.
struct BackgroundAugmentation {
  LaplacianMatrix base;
  double delta;
  Vector v;
};

BackgroundAugmentation make_background(const LaplacianMatrix& base, double delta, Vector v);

// Uniform distribution (1/n) 1.
Vector uniform_distribution(Index n);

// Throws InvalidArgument unless v >= 0 and sum(v) = 1 within 1e-10.
void require_distribution(const Vector& v, std::string_view name);

// Block assembly [[L + dI, -d 1], [-v^T, s]] of order n+1.
LaplacianMatrix hub_augment(const HubAugmentation& h);

// Closed form: every row (1/(s+d)) [v^T (I + L/d)^{-1}, d]. When v = d 1
// exactly, the symmetric form (1/(n+1)) [1^T (I + L/d)^{-1}, 1] is used so
// the hub weight is exactly 1/(n+1).
SquareMatrix hub_eigenprojection(const HubAugmentation& h);

// Every row (1/(n+1)) [column sums of Jbar, 1].
SquareMatrix symmetric_hub_limit(const LaplacianMatrix& l);

// Every row [vtilde^T Jbar, 0]. vtilde must be a distribution.
SquareMatrix subordinate_hub_limit(const LaplacianMatrix& l, const Vector& vtilde);

// Hub strengths along a subordinate sweep: v(d) = sqrt(d) * vtilde, so that
// d / s(d) = sqrt(d) -> 0.
Vector subordinate_hub_strengths(const Vector& vtilde, double delta);

// L + d (I - 1 v^T).
LaplacianMatrix background_laplacian(const BackgroundAugmentation& b);

// Every row v^T (I + L/d)^{-1}.
SquareMatrix background_eigenprojection(const BackgroundAugmentation& b);

// Every row v^T Jbar.
SquareMatrix background_limit(const LaplacianMatrix& l, const Vector& v);

// ---------------------------------------------------------------------------
// Discrete families.

/// Regularization of a DeGroot process x^{k+1} = P x^k with 0 < delta <= 1.
struct DiscreteRegularization {
  StochasticMatrix p;
  double delta;
  Vector v;

  double gamma() const { return 1.0 / delta - 1.0; }
};

// Validates delta in (0, 1] and v a distribution of matching length.
DiscreteRegularization make_discrete(const StochasticMatrix& p, double delta, Vector v);

// [[(1-d) P, d 1], [v^T, 0]]. Rejects v with a zero entry: Q is only
// guaranteed regular when every v_i > 0.
StochasticMatrix degroot_hub_matrix(const DiscreteRegularization& d);

// Every row (1/(1+d)) [v^T (I + gamma (I-P))^{-1}, d].
SquareMatrix degroot_hub_eigenprojection(const DiscreteRegularization& d);

// Every row [v^T (I-P)^proj, 0].
SquareMatrix degroot_hub_limit(const StochasticMatrix& p, const Vector& v);

// (1-d) P + d 1 v^T.
StochasticMatrix pagerank_matrix(const DiscreteRegularization& d);

// Limit of pagerank_matrix(d)^k: every row v^T (I + gamma (I-P))^{-1}.
SquareMatrix pagerank_eigenprojection(const DiscreteRegularization& d);

// Every row v^T (I-P)^proj.
SquareMatrix pagerank_limit(const StochasticMatrix& p, const Vector& v);

// I - P as a Laplacian.
LaplacianMatrix laplacian_of(const StochasticMatrix& p);

// ---------------------------------------------------------------------------
// Conforming pairs (AC = A, C^2 = C) behind the closed forms.

struct ConformingPair {
  SquareMatrix a;
  SquareMatrix c;
};

// A = L_0 + H_v, C = H_I (order n+1).
ConformingPair hub_pair(const LaplacianMatrix& l, const Vector& v);

// A = L, C = I - 1 v^T.
ConformingPair background_pair(const LaplacianMatrix& l, const Vector& v);

// max| (A+dC)^proj - (I-C)(I + A/d)^{-1} | using the algebraic
// eigenprojection. Both matrices must be Laplacian and conforming.
double laplacian_pair_identity_residual(const LaplacianMatrix& a, const LaplacianMatrix& c,
                                        double delta);

// ---------------------------------------------------------------------------
// Serialized method selection.

enum class Method { hub_symmetric, hub_subordinate, background, degroot_hub, pagerank, orthoproj };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);
bool is_discrete(Method m);
bool has_hub(Method m);

/// Which protocol family to apply, with its parameters. An empty `delta`
/// selects the delta -> 0 limit closed form.
struct RegularizationSpec {
  Method method = Method::background;
  std::optional<double> delta;
  std::optional<Vector> v;
  std::optional<Vector> vtilde;
};

// {"method": ..., "delta": number|null, "v": [..]|null, "vtilde": [..]|null}
RegularizationSpec parse_regularization_spec(std::string_view text);
std::string serialize_regularization_spec(const RegularizationSpec& spec);

}  // namespace latent
