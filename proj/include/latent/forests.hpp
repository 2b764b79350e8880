#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "latent/digraph.hpp"
#include "latent/matrix.hpp"
#include "latent/spectra.hpp"

namespace latent {

/// Aggregate over all maximum spanning in-forests of a digraph.
///
/// `f` is the total weight (product of arc weights, empty product 1) of the
/// maximum in-forests; `f_ks(k, s)` the weight of those in which vertex k
/// lies in the tree whose sink is s. Each row of f_ks sums to f.
struct ForestSummary {
  std::size_t n = 0;
  std::size_t max_arcs = 0;
  double f = 0.0;
  Matrix f_ks;
};

inline constexpr std::size_t kDefaultForestCap = 8;

// Vertex cap for enumeration: LC_TOOLKIT_FOREST_CAP if set to a positive
// integer, otherwise kDefaultForestCap.
std::size_t forest_cap();

// Calls `visit(successor)` once per spanning in-forest of g (every size,
// including the empty one). successor[v] is the sink-ward neighbour of v,
// or -1 for a root. Each vertex picks at most one out-arc and cyclic
// choices are pruned as soon as they close. Throws EnumerationCapError
// when g.order() > cap.
using ForestVisitor = std::function<void(std::span<const long>)>;
void for_each_in_forest(const WeightedDigraph& g, const ForestVisitor& visit,
                        std::size_t cap = forest_cap());

ForestSummary enumerate_in_forests(const WeightedDigraph& g, std::size_t cap = forest_cap());

// Normalized matrix of maximum in-forests, f_ks / f.
SquareMatrix max_forest_matrix(const WeightedDigraph& g, std::size_t cap = forest_cap());

// The same matrix packaged as an eigenprojection of laplacian(g).
Eigenprojection forest_eigenprojection(const WeightedDigraph& g, std::size_t cap = forest_cap());

// (I + tau L)^{-1}, the parametric in-forest matrix. Requires tau > 0.
SquareMatrix parametric_forest_matrix(const LaplacianMatrix& l, double tau);

}  // namespace latent
