#pragma once

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "latent/digraph.hpp"
#include "latent/matrix.hpp"
#include "latent/regularize.hpp"
#include "latent/report.hpp"

namespace latent {

/// Sampled states of a protocol; row k of `states` is the state at times[k].
struct Trajectory {
  std::vector<double> times;
  Matrix states;

  Vector final_state() const { return states.row(states.rows() - 1).transpose(); }
};

// Header "t,x1,...,xn", one sample per line, 17 significant digits.
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);

// x(t_k) = e^{-L t_k} x0. Times must be nonnegative and strictly increasing.
Trajectory simulate_continuous(const LaplacianMatrix& l, const Vector& x0,
                               std::span<const double> times);

/// State reached by doubling t (from 1) until successive states differ by
/// less than 1e-10 * max(1, max|x0|), with t capped at 2^60.
struct Settled {
  double t = 0.0;
  Vector state;
  bool converged = false;
};
Settled settle_continuous(const LaplacianMatrix& l, const Vector& x0);

// L^proj x0.
Vector continuous_limit(const LaplacianMatrix& l, const Vector& x0);

// x^{k+1} = P x^k for k = 0..k_max; times hold iteration indices.
Trajectory simulate_discrete(const StochasticMatrix& p, const Vector& x0, int k_max);

// lim M^k by repeated squaring; NumericalError if it has not settled to
// 1e-14 after 64 squarings (M not regular).
Matrix power_limit(const StochasticMatrix& m);

using ConsensusSystem = std::variant<LaplacianMatrix, StochasticMatrix>;

struct ConsensusOptions {
  // Adds "trajectory_residual": the closed-form value against a simulated
  // limit (regularized system for finite delta, plain system otherwise).
  bool simulate = false;
};

/// Latent consensus of `system` under the regularization `spec`.
///
/// Continuous methods (hub-*, background, orthoproj) need a Laplacian,
/// discrete ones (degroot-hub, pagerank) a stochastic matrix. Hub methods
/// with finite delta need x0 of length n+1 (hub initial state last);
/// hub-symmetric always does.
ConsensusReport latent_consensus(const ConsensusSystem& system, const RegularizationSpec& spec,
                                 const Vector& x0, const ConsensusOptions& options = {});

/// Hub-subordinate, background and (when I - L is stochastic) pagerank
/// latent consensus along a delta schedule and at the limit, all with the
/// uniform distribution.
struct CrossCheck {
  std::vector<double> deltas;
  // Max pairwise max-norm distance between the legs' agent weights.
  std::vector<double> deviations;
  double limit_deviation = 0.0;
  // Max distance of the limit weights from the column means of Jbar.
  double column_mean_deviation = 0.0;
  bool discrete_leg_enabled = false;
  double limit_value = 0.0;

  std::map<std::string, double> diagnostics() const;
};

// The discrete leg uses P = I - L and is skipped when some L_ii > 1.
CrossCheck consensus_cross_check(const LaplacianMatrix& l, const Vector& x0,
                                 std::span<const double> delta_schedule);

// {1e-1, 1e-2, ..., 1e-8}
std::vector<double> default_delta_schedule();

/// Symmetric hub with vanishing delta versus the hub-free consensus of a
/// system that already has a spanning in-tree.
struct HubConsistency {
  double hub_free_consensus = 0.0;
  double hub_consensus = 0.0;
  double hub_state = 0.0;
  // (1/n) sum_ij Jbar_ij y_j(0): the hub state that makes both agree.
  double required_hub_state = 0.0;
  bool equality_holds = false;
  bool consensuses_coincide = false;

  std::map<std::string, double> diagnostics() const;
};

// Throws InvalidArgument when L has no spanning in-tree or y0 is not of
// length n+1.
HubConsistency corollary1_consistency(const LaplacianMatrix& l, const Vector& y0);

}  // namespace latent
