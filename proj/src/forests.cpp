#include "latent/forests.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "latent/error.hpp"

namespace latent {

namespace {

struct Enumerator {
  const std::vector<std::vector<Arc>>& out;
  const ForestVisitor& visit;
  std::vector<long> successor;

  // True when pointing v at target would close a cycle through assigned
  // vertices. Unassigned vertices (index >= depth) end the walk.
  bool closes_cycle(std::size_t v, std::size_t target, std::size_t depth) const {
    std::size_t cur = target;
    while (true) {
      if (cur == v) return true;
      if (cur >= depth || successor[cur] < 0) return false;
      cur = static_cast<std::size_t>(successor[cur]);
    }
  }

  void run(std::size_t v) {
    if (v == successor.size()) {
      visit(successor);
      return;
    }
    successor[v] = -1;
    run(v + 1);
    for (const Arc& a : out[v]) {
      if (closes_cycle(v, a.to, v)) continue;
      successor[v] = static_cast<long>(a.to);
      run(v + 1);
    }
    successor[v] = -1;
  }
};

}  // namespace

std::size_t forest_cap() {
  if (const char* env = std::getenv("LC_TOOLKIT_FOREST_CAP")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<std::size_t>(value);
  }
  return kDefaultForestCap;
}

void for_each_in_forest(const WeightedDigraph& g, const ForestVisitor& visit, std::size_t cap) {
  if (g.order() > cap) {
    throw EnumerationCapError("in-forest enumeration refused: n = " + std::to_string(g.order()) +
                                  " exceeds the enumeration cap of " + std::to_string(cap) +
                                  " (override with LC_TOOLKIT_FOREST_CAP)",
                              cap);
  }
  std::vector<std::vector<Arc>> out(g.order());
  for (std::size_t v = 0; v < g.order(); ++v) out[v] = g.out_arcs(v);
  Enumerator e{out, visit, std::vector<long>(g.order(), -1)};
  e.run(0);
}

ForestSummary enumerate_in_forests(const WeightedDigraph& g, std::size_t cap) {
  const std::size_t n = g.order();
  // weight[v][t]: weight of the arc v -> t (0 when absent).
  std::vector<std::vector<double>> weight(n, std::vector<double>(n, 0.0));
  for (const Arc& a : g.arcs()) weight[a.from][a.to] = a.weight;

  ForestSummary summary;
  summary.n = n;
  summary.f_ks = Matrix::Zero(static_cast<Index>(n), static_cast<Index>(n));
  std::vector<std::size_t> sink(n);

  for_each_in_forest(
      g,
      [&](std::span<const long> succ) {
        std::size_t arcs = 0;
        double w = 1.0;
        for (std::size_t v = 0; v < n; ++v) {
          if (succ[v] >= 0) {
            ++arcs;
            w *= weight[v][static_cast<std::size_t>(succ[v])];
          }
        }
        if (arcs < summary.max_arcs) return;
        if (arcs > summary.max_arcs) {
          summary.max_arcs = arcs;
          summary.f = 0.0;
          summary.f_ks.setZero();
        }
        for (std::size_t k = 0; k < n; ++k) {
          std::size_t cur = k;
          while (succ[cur] >= 0) cur = static_cast<std::size_t>(succ[cur]);
          sink[k] = cur;
        }
        summary.f += w;
        for (std::size_t k = 0; k < n; ++k) {
          summary.f_ks(static_cast<Index>(k), static_cast<Index>(sink[k])) += w;
        }
      },
      cap);
  return summary;
}

SquareMatrix max_forest_matrix(const WeightedDigraph& g, std::size_t cap) {
  const ForestSummary s = enumerate_in_forests(g, cap);
  return SquareMatrix(s.f_ks / s.f);
}

Eigenprojection forest_eigenprojection(const WeightedDigraph& g, std::size_t cap) {
  return annotate_projection(max_forest_matrix(g, cap), ProjectionMethod::forest_oracle,
                             laplacian(g).matrix());
}

SquareMatrix parametric_forest_matrix(const LaplacianMatrix& l, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument("parametric forest matrix needs finite tau > 0");
  }
  const Index n = l.order();
  const Matrix m = Matrix::Identity(n, n) + tau * l.values();
  Eigen::PartialPivLU<Matrix> lu(m);
  Matrix inv = lu.inverse();
  if (!inv.allFinite()) throw NumericalError("internal inversion error: I + tau L is singular");
  return SquareMatrix(std::move(inv));
}

}  // namespace latent
