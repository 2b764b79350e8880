#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "latent/matrix.hpp"

namespace latent {

/// Arc (from, to) means agent `from` depends on agent `to` with the given
/// strength. Indices are 0-based in memory; the JSON format is 1-based.
struct Arc {
  std::size_t from = 0;
  std::size_t to = 0;
  double weight = 0.0;

  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Weighted dependency digraph.
///
/// Invariants: at least one vertex, every weight finite and strictly
/// positive, no self-loops, no duplicate (from, to) pairs. Arcs are kept
/// sorted by (from, to) so equal graphs compare equal.
class WeightedDigraph {
 public:
  // Validates and canonicalizes. Self-loops are dropped (the protocol
  // never reads a_ii); everything else that breaks an invariant throws
  // InvalidArgument.
  WeightedDigraph(std::size_t n, std::vector<Arc> arcs);

  // Builds the digraph of a dependency matrix: one arc per positive
  // off-diagonal entry, diagonal ignored, negative entries rejected.
  static WeightedDigraph from_dependency_matrix(const Matrix& a);

  std::size_t order() const noexcept { return n_; }
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }

  // Out-arcs of `v` (the agents v depends on), sorted by target.
  std::vector<Arc> out_arcs(std::size_t v) const;

  friend bool operator==(const WeightedDigraph&, const WeightedDigraph&) = default;

 private:
  std::size_t n_;
  std::vector<Arc> arcs_;
};

/// Square matrix known to have nonpositive off-diagonal entries and zero
/// row sums (within 1e-12 * n * max|entry|).
class LaplacianMatrix {
 public:
  const SquareMatrix& matrix() const noexcept { return matrix_; }
  const Matrix& values() const noexcept { return matrix_.values(); }
  Index order() const noexcept { return matrix_.order(); }

 private:
  explicit LaplacianMatrix(SquareMatrix m) : matrix_(std::move(m)) {}
  friend LaplacianMatrix validate_laplacian(SquareMatrix m);

  SquareMatrix matrix_;
};

WeightedDigraph parse_digraph(std::string_view text);

// Canonical compact JSON: {"n":N,"arcs":[[from,to,weight],...]}, 1-based,
// sorted by (from, to), weights in shortest round-trip form.
std::string serialize_digraph(const WeightedDigraph& g);

// L = diag(A 1) - A.
LaplacianMatrix laplacian(const WeightedDigraph& g);

// Throws LaplacianError pointing at the first violated row or entry.
LaplacianMatrix validate_laplacian(SquareMatrix m);

// Dependency digraph read back from a Laplacian (arc i->j when L_ij < 0).
WeightedDigraph digraph_of(const LaplacianMatrix& l);

// True iff some vertex is reachable along arcs from every vertex.
bool has_spanning_in_tree(const WeightedDigraph& g);
bool has_spanning_in_tree(const LaplacianMatrix& l);

// Erdos-Renyi style generator: each ordered pair (i != j) gets an arc with
// probability p, weight uniform in (0, 2]. Deterministic for a given seed.
WeightedDigraph random_digraph(std::size_t n, std::uint64_t seed, double p = 0.4);

}  // namespace latent
