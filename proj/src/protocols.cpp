#include "latent/protocols.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <sstream>

#include "latent/error.hpp"
#include "latent/orthoproj.hpp"
#include "latent/spectra.hpp"

namespace latent {

namespace {

constexpr double kMaxSettleTime = 1152921504606846976.0;  // 2^60

void require_state_length(const Vector& x0, Index n, std::string_view what) {
  if (x0.size() != n) {
    std::ostringstream msg;
    msg << what << " has length " << x0.size() << ", expected " << n;
    throw InvalidArgument(msg.str());
  }
  if (!x0.allFinite()) throw InvalidArgument(std::string(what) + " has non-finite entries");
}

// Limiting projection of a latent-consensus method plus the bookkeeping
// needed to compare it against a simulation.
struct Evaluation {
  SquareMatrix projection;
  // Set for finite delta: the regularized continuous system, or the
  // regularized stochastic matrix.
  std::optional<LaplacianMatrix> regularized;
  std::optional<StochasticMatrix> regularized_discrete;
  // Limit forms: value = limit_mix . (plain limit state) + hub_mix * hub state.
  std::optional<LaplacianMatrix> plain;
  Vector limit_mix;
  double hub_mix = 0.0;
};

const LaplacianMatrix& continuous_system(const ConsensusSystem& system, Method m) {
  if (const auto* l = std::get_if<LaplacianMatrix>(&system)) return *l;
  throw InvalidArgument("method " + std::string(to_string(m)) +
                        " is continuous and needs a Laplacian system");
}

const StochasticMatrix& discrete_system(const ConsensusSystem& system, Method m) {
  if (const auto* p = std::get_if<StochasticMatrix>(&system)) return *p;
  throw InvalidArgument("method " + std::string(to_string(m)) +
                        " is discrete and needs a row-stochastic system");
}

Vector distribution_or_uniform(const std::optional<Vector>& v, Index n) {
  return v ? *v : uniform_distribution(n);
}

Evaluation evaluate(const ConsensusSystem& system, const RegularizationSpec& spec) {
  const Method m = spec.method;
  switch (m) {
    case Method::hub_symmetric: {
      const LaplacianMatrix& l = continuous_system(system, m);
      const Index n = l.order();
      if (spec.delta) {
        const HubAugmentation h = make_hub(l, *spec.delta, Vector::Constant(n, *spec.delta));
        return Evaluation{hub_eigenprojection(h), hub_augment(h)};
      }
      Evaluation e{symmetric_hub_limit(l)};
      e.plain = l;
      e.limit_mix = Vector::Constant(n, 1.0 / static_cast<double>(n + 1));
      e.hub_mix = 1.0 / static_cast<double>(n + 1);
      return e;
    }
    case Method::hub_subordinate: {
      const LaplacianMatrix& l = continuous_system(system, m);
      if (spec.delta) {
        Vector v;
        if (spec.v) {
          v = *spec.v;
        } else if (spec.vtilde) {
          v = subordinate_hub_strengths(*spec.vtilde, *spec.delta);
        } else {
          throw InvalidArgument("hub-subordinate with finite delta needs v or vtilde");
        }
        const HubAugmentation h = make_hub(l, *spec.delta, std::move(v));
        return Evaluation{hub_eigenprojection(h), hub_augment(h)};
      }
      Vector vtilde;
      if (spec.vtilde) {
        vtilde = *spec.vtilde;
      } else if (spec.v && spec.v->sum() > 0.0) {
        vtilde = *spec.v / spec.v->sum();
      } else {
        throw InvalidArgument("hub-subordinate limit needs vtilde (or a nonzero v to normalize)");
      }
      Evaluation e{subordinate_hub_limit(l, vtilde)};
      e.plain = l;
      e.limit_mix = vtilde;
      return e;
    }
    case Method::background: {
      const LaplacianMatrix& l = continuous_system(system, m);
      const Vector v = distribution_or_uniform(spec.v, l.order());
      if (spec.delta) {
        const BackgroundAugmentation b = make_background(l, *spec.delta, v);
        return Evaluation{background_eigenprojection(b), background_laplacian(b)};
      }
      Evaluation e{background_limit(l, v)};
      e.plain = l;
      e.limit_mix = v;
      return e;
    }
    case Method::degroot_hub: {
      const StochasticMatrix& p = discrete_system(system, m);
      const Vector v = distribution_or_uniform(spec.v, p.order());
      if (spec.delta) {
        const DiscreteRegularization d = make_discrete(p, *spec.delta, v);
        Evaluation e{degroot_hub_eigenprojection(d)};
        e.regularized_discrete = degroot_hub_matrix(d);
        return e;
      }
      if ((v.array() <= 0.0).any()) {
        throw InvalidArgument("degroot-hub needs every v_i > 0");
      }
      Evaluation e{degroot_hub_limit(p, v)};
      e.plain = laplacian_of(p);
      e.limit_mix = v;
      return e;
    }
    case Method::pagerank: {
      const StochasticMatrix& p = discrete_system(system, m);
      const Vector v = distribution_or_uniform(spec.v, p.order());
      if (spec.delta) {
        const DiscreteRegularization d = make_discrete(p, *spec.delta, v);
        Evaluation e{pagerank_eigenprojection(d)};
        e.regularized_discrete = pagerank_matrix(d);
        return e;
      }
      Evaluation e{pagerank_limit(p, v)};
      e.plain = laplacian_of(p);
      e.limit_mix = v;
      return e;
    }
    case Method::orthoproj:
      break;
  }
  throw InvalidArgument("unsupported method");
}

double simulated_residual(const Evaluation& e, const Vector& x0, double value) {
  if (e.regularized) {
    const Settled s = settle_continuous(*e.regularized, x0);
    return (s.state.array() - value).abs().maxCoeff();
  }
  if (e.regularized_discrete) {
    const Vector limit = power_limit(*e.regularized_discrete) * x0;
    return (limit.array() - value).abs().maxCoeff();
  }
  const Index n = e.plain->order();
  const Settled s = settle_continuous(*e.plain, x0.head(n));
  double predicted = e.limit_mix.dot(s.state);
  if (x0.size() > n) predicted += e.hub_mix * x0(n);
  return std::abs(predicted - value);
}

Vector agent_weights(const SquareMatrix& projection, Index n) {
  return projection.values().row(0).head(n).transpose();
}

double max_pairwise(const std::vector<Vector>& legs) {
  double worst = 0.0;
  for (std::size_t a = 0; a < legs.size(); ++a) {
    for (std::size_t b = a + 1; b < legs.size(); ++b) {
      worst = std::max(worst, (legs[a] - legs[b]).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

std::string delta_key(const char* prefix, double delta) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%.0e", prefix, delta);
  return buf;
}

}  // namespace

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "t";
  for (Index j = 0; j < trajectory.states.cols(); ++j) out << ",x" << j + 1;
  out << "\n";
  for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
    out << trajectory.times[k];
    for (Index j = 0; j < trajectory.states.cols(); ++j) {
      out << "," << trajectory.states(static_cast<Index>(k), j);
    }
    out << "\n";
  }
  out.precision(old_precision);
}

Trajectory simulate_continuous(const LaplacianMatrix& l, const Vector& x0,
                               std::span<const double> times) {
  require_state_length(x0, l.order(), "x0");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0) || !std::isfinite(times[k])) {
      throw InvalidArgument("sample times must be finite and nonnegative");
    }
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw InvalidArgument("sample times must be strictly increasing");
    }
  }
  const SquareMatrix negated(-l.values());
  Trajectory traj;
  traj.times.assign(times.begin(), times.end());
  traj.states.resize(static_cast<Index>(times.size()), x0.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    traj.states.row(static_cast<Index>(k)) =
        (matrix_exponential(negated, times[k]).values() * x0).transpose();
  }
  return traj;
}

Settled settle_continuous(const LaplacianMatrix& l, const Vector& x0) {
  require_state_length(x0, l.order(), "x0");
  const SquareMatrix negated(-l.values());
  const double tol = 1e-10 * std::max(1.0, x0.cwiseAbs().maxCoeff());
  Settled s;
  s.t = 1.0;
  s.state = matrix_exponential(negated, s.t).values() * x0;
  while (s.t < kMaxSettleTime) {
    const double next_t = 2.0 * s.t;
    Vector next = matrix_exponential(negated, next_t).values() * x0;
    const double diff = (next - s.state).cwiseAbs().maxCoeff();
    s.t = next_t;
    s.state = std::move(next);
    if (diff < tol) {
      s.converged = true;
      break;
    }
  }
  return s;
}

Vector continuous_limit(const LaplacianMatrix& l, const Vector& x0) {
  require_state_length(x0, l.order(), "x0");
  return eigenprojection(l).matrix.values() * x0;
}

Trajectory simulate_discrete(const StochasticMatrix& p, const Vector& x0, int k_max) {
  require_state_length(x0, p.order(), "x0");
  if (k_max < 0) throw InvalidArgument("k_max must be nonnegative");
  Trajectory traj;
  traj.states.resize(k_max + 1, x0.size());
  Vector x = x0;
  for (int k = 0; k <= k_max; ++k) {
    traj.times.push_back(static_cast<double>(k));
    traj.states.row(k) = x.transpose();
    x = p.values() * x;
  }
  return traj;
}

Matrix power_limit(const StochasticMatrix& m) {
  Matrix current = m.values();
  for (int i = 0; i < 64; ++i) {
    Matrix next = current * current;
    const double diff = max_abs_diff(next, current);
    current = std::move(next);
    if (diff < 1e-14) return current;
  }
  throw NumericalError("powers of the stochastic matrix do not converge (matrix is not regular)");
}

ConsensusReport latent_consensus(const ConsensusSystem& system, const RegularizationSpec& spec,
                                 const Vector& x0, const ConsensusOptions& options) {
  if (spec.method == Method::orthoproj) {
    if (spec.delta) throw InvalidArgument("orthoproj takes no delta");
    const LaplacianMatrix& l = continuous_system(system, spec.method);
    ConsensusReport report = orthoproj_consensus(l, x0);
    if (options.simulate && report.value) {
      const Matrix s = orthogonal_projector(consensus_subspace(eigenprojection(l).matrix)).values();
      const Settled settled = settle_continuous(l, s * x0);
      report.diagnostics["trajectory_residual"] =
          (settled.state.array() - *report.value).abs().maxCoeff();
    }
    return report;
  }

  const Index n = std::visit([](const auto& s) { return s.order(); }, system);
  if (spec.v) require_state_length(*spec.v, n, "v");
  if (spec.vtilde) require_state_length(*spec.vtilde, n, "vtilde");

  const bool needs_hub_state =
      spec.method == Method::hub_symmetric || (has_hub(spec.method) && spec.delta);
  if (needs_hub_state && x0.size() != n + 1) {
    throw InvalidArgument("method " + std::string(to_string(spec.method)) +
                          " needs the hub initial state: x0 must have length " +
                          std::to_string(n + 1));
  }
  if (!needs_hub_state) {
    if (!(x0.size() == n || (has_hub(spec.method) && x0.size() == n + 1))) {
      throw InvalidArgument("x0 has length " + std::to_string(x0.size()) + ", expected " +
                            std::to_string(n));
    }
  }
  if (!x0.allFinite()) throw InvalidArgument("x0 has non-finite entries");

  const Evaluation e = evaluate(system, spec);
  const Matrix& w = e.projection.values();

  ConsensusReport report;
  report.method = std::string(to_string(spec.method));
  report.delta_used = spec.delta;
  report.weights = w.row(0).transpose();
  const double spread = row_spread(w);
  report.diagnostics["row_spread"] = spread;
  report.diagnostics["weight_sum_error"] = std::abs(report.weights.sum() - 1.0);

  Vector state = x0;
  if (state.size() < report.weights.size()) {
    // Limit of a hub method without a hub state: the hub weight is 0.
    state.conservativeResize(report.weights.size());
    state(state.size() - 1) = 0.0;
  }
  if (spread <= 1e-10) {
    report.value = report.weights.dot(state);
    if (options.simulate) {
      report.diagnostics["trajectory_residual"] = simulated_residual(e, state, *report.value);
    }
  }
  return report;
}

std::vector<double> default_delta_schedule() {
  std::vector<double> deltas;
  for (int e = 1; e <= 8; ++e) deltas.push_back(std::pow(10.0, -e));
  return deltas;
}

CrossCheck consensus_cross_check(const LaplacianMatrix& l, const Vector& x0,
                                 std::span<const double> delta_schedule) {
  const Index n = l.order();
  require_state_length(x0, n, "x0");
  const Vector uniform = uniform_distribution(n);

  CrossCheck result;
  result.discrete_leg_enabled = l.values().diagonal().maxCoeff() <= 1.0;
  std::optional<StochasticMatrix> p;
  if (result.discrete_leg_enabled) {
    p = validate_stochastic(SquareMatrix(Matrix::Identity(n, n) - l.values()));
  }

  for (double delta : delta_schedule) {
    std::vector<Vector> legs;
    const HubAugmentation h = make_hub(l, delta, subordinate_hub_strengths(uniform, delta));
    legs.push_back(agent_weights(hub_eigenprojection(h), n));
    legs.push_back(agent_weights(background_eigenprojection(make_background(l, delta, uniform)), n));
    if (p && delta <= 1.0) {
      legs.push_back(agent_weights(pagerank_eigenprojection(make_discrete(*p, delta, uniform)), n));
    }
    result.deltas.push_back(delta);
    result.deviations.push_back(max_pairwise(legs));
  }

  std::vector<Vector> limits;
  limits.push_back(agent_weights(subordinate_hub_limit(l, uniform), n));
  limits.push_back(agent_weights(background_limit(l, uniform), n));
  if (p) limits.push_back(agent_weights(pagerank_limit(*p, uniform), n));
  result.limit_deviation = max_pairwise(limits);

  const Vector column_means = column_sums(eigenprojection(l).matrix.values()) / static_cast<double>(n);
  for (const Vector& leg : limits) {
    result.column_mean_deviation =
        std::max(result.column_mean_deviation, (leg - column_means).cwiseAbs().maxCoeff());
  }
  result.limit_value = limits.front().dot(x0);
  return result;
}

std::map<std::string, double> CrossCheck::diagnostics() const {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    out[delta_key("deviation_delta_", deltas[i])] = deviations[i];
  }
  out["limit_deviation"] = limit_deviation;
  out["column_mean_deviation"] = column_mean_deviation;
  out["discrete_leg_enabled"] = discrete_leg_enabled ? 1.0 : 0.0;
  out["limit_value"] = limit_value;
  return out;
}

HubConsistency corollary1_consistency(const LaplacianMatrix& l, const Vector& y0) {
  const Index n = l.order();
  require_state_length(y0, n + 1, "y0");
  if (!has_spanning_in_tree(l)) {
    throw InvalidArgument("corollary check needs a spanning in-tree (plain consensus must exist)");
  }
  const Matrix jbar = eigenprojection(l).matrix.values();
  const Vector agents = y0.head(n);
  const Vector col = column_sums(jbar);

  HubConsistency c;
  c.hub_free_consensus = jbar.row(0).dot(agents);
  c.hub_state = y0(n);
  c.required_hub_state = col.dot(agents) / static_cast<double>(n);
  c.hub_consensus = (col.dot(agents) + c.hub_state) / static_cast<double>(n + 1);
  const double scale = std::max(1.0, y0.cwiseAbs().maxCoeff());
  c.equality_holds = std::abs(c.hub_state - c.required_hub_state) <= 1e-10 * scale;
  c.consensuses_coincide = std::abs(c.hub_consensus - c.hub_free_consensus) <= 1e-10 * scale;
  return c;
}

std::map<std::string, double> HubConsistency::diagnostics() const {
  return {{"hub_free_consensus", hub_free_consensus},
          {"hub_consensus", hub_consensus},
          {"hub_state", hub_state},
          {"required_hub_state", required_hub_state},
          {"equality_holds", equality_holds ? 1.0 : 0.0},
          {"consensuses_coincide", consensuses_coincide ? 1.0 : 0.0}};
}

}  // namespace latent
