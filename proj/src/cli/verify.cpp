#include "latent/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "latent/error.hpp"
#include "latent/forests.hpp"
#include "latent/orthoproj.hpp"
#include "latent/protocols.hpp"
#include "latent/regularize.hpp"
#include "latent/spectra.hpp"

namespace latent {

namespace {

class Battery {
 public:
  explicit Battery(double multiplier) : multiplier_(multiplier) {}

  // Runs `residual` and compares it with tolerance * multiplier. Library
  // errors turn into a failed check carrying the message.
  void check(const std::string& name, double tolerance, const std::function<double()>& residual) {
    CheckResult r{name, 0.0, tolerance * multiplier_};
    try {
      r.residual = residual();
      r.status = (std::isfinite(r.residual) && r.residual <= r.tolerance) ? CheckStatus::pass
                                                                         : CheckStatus::fail;
    } catch (const Error& e) {
      r.status = CheckStatus::fail;
      r.residual = std::nan("");
      r.note = e.what();
    }
    results_.push_back(std::move(r));
  }

  void skip(const std::string& name, double tolerance, std::string note) {
    results_.push_back({name, 0.0, tolerance * multiplier_, CheckStatus::skip, std::move(note)});
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  double multiplier_;
  std::vector<CheckResult> results_;
};

// Strictly positive, non-uniform hub strengths.
Vector ramp(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = 0.1 * static_cast<double>(i + 1);
  return v;
}

double scale_of(const Matrix& m) { return std::max(1.0, max_abs(m)); }

}  // namespace

const char* to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass:
      return "PASS";
    case CheckStatus::fail:
      return "FAIL";
    case CheckStatus::skip:
      return "SKIP";
  }
  return "?";
}

bool all_passed(const std::vector<CheckResult>& checks) {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::fail; });
}

std::vector<CheckResult> run_identity_battery(const LaplacianMatrix& l, double tol_multiplier) {
  Battery b(tol_multiplier);
  const Index n = l.order();
  const Matrix& lv = l.values();
  const Vector uniform = uniform_distribution(n);
  const Eigenprojection ep = eigenprojection(l);
  const Matrix& jbar = ep.matrix.values();

  b.check("eigenprojection_idempotent", 1e-9, [&] { return ep.idempotency_residual; });
  b.check("eigenprojection_annihilates_L", 1e-9,
          [&] { return std::max(max_abs(lv * jbar), max_abs(jbar * lv)); });

  const WeightedDigraph g = digraph_of(l);
  if (g.order() <= forest_cap()) {
    b.check("forest_oracle_agreement", 1e-9,
            [&] { return max_abs_diff(max_forest_matrix(g).values(), jbar); });
  } else {
    b.skip("forest_oracle_agreement", 1e-9,
           "n exceeds the enumeration cap of " + std::to_string(forest_cap()));
  }
  // At tau = 1e8 a weakly coupled graph is still O(1/tau) away from the
  // limit; the schedule reports that itself, so it is not held against L.
  const Eigenprojection resolvent = eigenprojection_resolvent(l);
  if (resolvent.converged) {
    b.check("resolvent_limit_agreement", 1e-6,
            [&] { return max_abs_diff(resolvent.matrix.values(), jbar); });
  } else {
    b.skip("resolvent_limit_agreement", 1e-6,
           "tau schedule not converged, last difference " +
               std::to_string(resolvent.successive_differences.back()));
  }
  b.check("exponential_limit_agreement", 1e-8,
          [&] { return max_abs_diff(exponential_limit(l).matrix.values(), jbar); });

  const ConformingPair hub = hub_pair(l, ramp(n));
  const ConformingPair bg = background_pair(l, uniform);
  b.check("pair_identity_hub", 1e-8, [&] {
    return laplacian_pair_identity_residual(validate_laplacian(hub.a), validate_laplacian(hub.c),
                                            0.3);
  });
  b.check("pair_identity_background", 1e-8, [&] {
    return laplacian_pair_identity_residual(validate_laplacian(bg.a), validate_laplacian(bg.c),
                                            0.7);
  });
  b.check("exp_identity_hub", 1e-9, [&] {
    return exp_regularization_identity_residual(hub.a, hub.c, 0.3, 2.0) / scale_of(hub.a.values());
  });
  b.check("exp_identity_background", 1e-9, [&] {
    return exp_regularization_identity_residual(bg.a, bg.c, 0.5, 1.0) / scale_of(bg.a.values());
  });
  b.check("power_identity_hub", 1e-9, [&] {
    const Matrix m = hub.a.values() + 0.2 * hub.c.values();
    return power_monomial_identity_residual(hub.a, hub.c, 0.2, 4) /
           scale_of(m * m * m * m);
  });
  b.check("power_identity_background", 1e-9, [&] {
    const Matrix m = bg.a.values() + bg.c.values();
    return power_monomial_identity_residual(bg.a, bg.c, 1.0, 3) / scale_of(m * m * m);
  });

  b.check("hub_closed_form", 1e-8, [&] {
    const HubAugmentation h = make_hub(l, 0.1, ramp(n));
    return max_abs_diff(hub_eigenprojection(h).values(),
                        eigenprojection(hub_augment(h)).matrix.values());
  });
  b.check("background_closed_form", 1e-8, [&] {
    const BackgroundAugmentation bga = make_background(l, 0.1, uniform);
    return max_abs_diff(background_eigenprojection(bga).values(),
                        eigenprojection(background_laplacian(bga)).matrix.values());
  });

  // Discrete legs run on P = I - L / max(1, max L_ii), which is stochastic
  // and has the same eigenprojection of I - P as L.
  const double scale = std::max(1.0, lv.diagonal().maxCoeff());
  Matrix pm = Matrix::Identity(n, n) - lv / scale;
  for (Index i = 0; i < n; ++i) pm(i, i) = 1.0 - (pm.row(i).sum() - pm(i, i));
  const StochasticMatrix p = validate_stochastic(SquareMatrix(pm));
  const DiscreteRegularization d = make_discrete(p, 0.3, uniform);

  b.check("degroot_hub_closed_form", 1e-8, [&] {
    const Matrix q = degroot_hub_matrix(d).values();
    const Matrix id = Matrix::Identity(n + 1, n + 1);
    return max_abs_diff(degroot_hub_eigenprojection(d).values(),
                        eigenprojection(SquareMatrix(id - q)).matrix.values());
  });
  b.check("degroot_hub_power_limit", 1e-8, [&] {
    return max_abs_diff(degroot_hub_eigenprojection(d).values(),
                        power_limit(degroot_hub_matrix(d)));
  });
  b.check("pagerank_closed_form", 1e-8, [&] {
    const Matrix m = pagerank_matrix(d).values();
    return max_abs_diff(pagerank_eigenprojection(d).values(),
                        eigenprojection(SquareMatrix(Matrix::Identity(n, n) - m)).matrix.values());
  });
  b.check("pagerank_power_limit", 1e-8, [&] {
    return max_abs_diff(pagerank_eigenprojection(d).values(), power_limit(pagerank_matrix(d)));
  });

  b.check("latent_method_agreement", 1e-10, [&] {
    std::vector<Vector> legs{
        subordinate_hub_limit(l, uniform).values().row(0).head(n).transpose(),
        background_limit(l, uniform).values().row(0).transpose(),
        pagerank_limit(p, uniform).values().row(0).transpose(),
        degroot_hub_limit(p, uniform).values().row(0).head(n).transpose(),
    };
    const Vector means = column_sums(jbar) / static_cast<double>(n);
    double worst = 0.0;
    for (const Vector& leg : legs) worst = std::max(worst, (leg - means).cwiseAbs().maxCoeff());
    return worst;
  });
  b.check("symmetric_hub_weight", 0.0, [&] {
    const double expected = 1.0 / static_cast<double>(n + 1);
    double worst = 0.0;
    for (double delta : {1.0, 1e-2, 1e-4}) {
      const HubAugmentation h = make_hub(l, delta, Vector::Constant(n, delta));
      const Matrix w = hub_eigenprojection(h).values();
      worst = std::max(worst, (w.col(n).array() - expected).abs().maxCoeff());
    }
    return worst;
  });

  const Matrix s = orthogonal_projector(consensus_subspace(ep.matrix)).values();
  b.check("orthoproj_projector", 1e-10, [&] {
    return std::max(max_abs_diff(s, s.transpose()), max_abs_diff(s * s, s));
  });
  b.check("orthoproj_genuine_consensus", 1e-10, [&] { return row_spread(jbar * s); });

  if (has_spanning_in_tree(g)) {
    b.check("in_tree_collapse", 1e-9, [&] {
      const Vector common = jbar.row(0).transpose();
      std::vector<Vector> weights{
          subordinate_hub_limit(l, uniform).values().row(0).head(n).transpose(),
          background_limit(l, uniform).values().row(0).transpose(),
          pagerank_limit(p, uniform).values().row(0).transpose(),
          (jbar * s).row(0).transpose(),
      };
      double worst = row_spread(jbar);
      for (const Vector& w : weights) worst = std::max(worst, (w - common).cwiseAbs().maxCoeff());
      return worst;
    });
  } else {
    b.skip("in_tree_collapse", 1e-9, "no spanning in-tree");
  }
  return b.take();
}

}  // namespace latent
