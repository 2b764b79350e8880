#include "latent/digraph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "latent/error.hpp"

namespace latent {

namespace {

using nlohmann::json;

bool arc_order(const Arc& a, const Arc& b) {
  return a.from != b.from ? a.from < b.from : a.to < b.to;
}

std::string arc_label(const Arc& a) {
  std::ostringstream os;
  os << "(" << a.from + 1 << "," << a.to + 1 << ")";
  return os.str();
}

std::size_t json_index(const json& value, std::size_t n, std::size_t arc_pos) {
  if (!value.is_number_integer()) {
    throw ParseError("arc " + std::to_string(arc_pos) + ": vertex index must be an integer");
  }
  const auto idx = value.get<std::int64_t>();
  if (idx < 1 || static_cast<std::size_t>(idx) > n) {
    throw ParseError("arc " + std::to_string(arc_pos) + ": vertex index " + std::to_string(idx) +
                     " out of range [1.." + std::to_string(n) + "]");
  }
  return static_cast<std::size_t>(idx - 1);
}

// Vertices that can reach `root` following arc direction.
std::vector<bool> reaching(const std::vector<std::vector<std::size_t>>& in_adj, std::size_t root) {
  std::vector<bool> seen(in_adj.size(), false);
  std::vector<std::size_t> stack{root};
  seen[root] = true;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t u : in_adj[v]) {
      if (!seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
    }
  }
  return seen;
}

}  // namespace

WeightedDigraph::WeightedDigraph(std::size_t n, std::vector<Arc> arcs) : n_(n) {
  if (n == 0) throw InvalidArgument("digraph needs at least one vertex");
  arcs_.reserve(arcs.size());
  for (const Arc& a : arcs) {
    if (a.from >= n || a.to >= n) {
      throw InvalidArgument("arc " + arc_label(a) + " has a vertex index outside [1.." +
                            std::to_string(n) + "]");
    }
    if (!std::isfinite(a.weight) || a.weight <= 0.0) {
      std::ostringstream msg;
      msg << "arc " << arc_label(a) << " has non-positive or non-finite weight " << a.weight;
      throw InvalidArgument(msg.str());
    }
    if (a.from == a.to) continue;
    arcs_.push_back(a);
  }
  std::sort(arcs_.begin(), arcs_.end(), arc_order);
  const auto dup = std::adjacent_find(arcs_.begin(), arcs_.end(), [](const Arc& a, const Arc& b) {
    return a.from == b.from && a.to == b.to;
  });
  if (dup != arcs_.end()) throw InvalidArgument("duplicate arc " + arc_label(*dup));
}

WeightedDigraph WeightedDigraph::from_dependency_matrix(const Matrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("dependency matrix must be square");
  std::vector<Arc> arcs;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (i == j) continue;
      if (a(i, j) < 0.0) throw InvalidArgument("dependency matrix has a negative entry");
      if (a(i, j) > 0.0) {
        arcs.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), a(i, j)});
      }
    }
  }
  return WeightedDigraph(static_cast<std::size_t>(a.rows()), std::move(arcs));
}

std::vector<Arc> WeightedDigraph::out_arcs(std::size_t v) const {
  auto lo = std::lower_bound(arcs_.begin(), arcs_.end(), Arc{v, 0, 0.0}, arc_order);
  std::vector<Arc> out;
  for (; lo != arcs_.end() && lo->from == v; ++lo) out.push_back(*lo);
  return out;
}

WeightedDigraph parse_digraph(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("graph JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("graph JSON: top level must be an object");
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw ParseError("graph JSON: \"n\" must be an integer");
  }
  const auto n_signed = doc["n"].get<std::int64_t>();
  if (n_signed < 1) throw ParseError("graph JSON: \"n\" must be positive");
  const auto n = static_cast<std::size_t>(n_signed);
  if (!doc.contains("arcs") || !doc["arcs"].is_array()) {
    throw ParseError("graph JSON: \"arcs\" must be an array");
  }

  std::vector<Arc> arcs;
  std::size_t pos = 0;
  for (const json& item : doc["arcs"]) {
    ++pos;
    if (!item.is_array() || item.size() != 3) {
      throw ParseError("arc " + std::to_string(pos) + ": expected [from, to, weight]");
    }
    Arc a;
    a.from = json_index(item[0], n, pos);
    a.to = json_index(item[1], n, pos);
    if (!item[2].is_number()) {
      throw ParseError("arc " + std::to_string(pos) + ": weight must be a number");
    }
    a.weight = item[2].get<double>();
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw ParseError("arc " + std::to_string(pos) + ": weight must be positive and finite");
    }
    arcs.push_back(a);
  }
  try {
    return WeightedDigraph(n, std::move(arcs));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("graph JSON: ") + e.what());
  }
}

std::string serialize_digraph(const WeightedDigraph& g) {
  json arcs = json::array();
  for (const Arc& a : g.arcs()) arcs.push_back(json::array({a.from + 1, a.to + 1, a.weight}));
  json doc;
  doc["n"] = g.order();
  doc["arcs"] = std::move(arcs);
  // nlohmann orders object keys alphabetically; emit "n" first by hand.
  return "{\"n\":" + doc["n"].dump() + ",\"arcs\":" + doc["arcs"].dump() + "}";
}

LaplacianMatrix laplacian(const WeightedDigraph& g) {
  const auto n = static_cast<Index>(g.order());
  Matrix l = Matrix::Zero(n, n);
  for (const Arc& a : g.arcs()) {
    const auto i = static_cast<Index>(a.from);
    const auto j = static_cast<Index>(a.to);
    l(i, j) = -a.weight;
    l(i, i) += a.weight;
  }
  return validate_laplacian(SquareMatrix(std::move(l)));
}

LaplacianMatrix validate_laplacian(SquareMatrix m) {
  const Matrix& v = m.values();
  const Index n = v.rows();
  const double tol = 1e-12 * static_cast<double>(n) * max_abs(v);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j && v(i, j) > 0.0) {
        std::ostringstream msg;
        msg << "not a Laplacian: positive off-diagonal entry " << v(i, j) << " at (" << i + 1
            << "," << j + 1 << ")";
        throw LaplacianError(msg.str(), static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
    const double sum = v.row(i).sum();
    if (std::abs(sum) > tol) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "not a Laplacian: row " << i + 1 << " sums to " << sum;
      throw LaplacianError(msg.str(), static_cast<std::size_t>(i), static_cast<std::size_t>(i));
    }
  }
  return LaplacianMatrix(std::move(m));
}

WeightedDigraph digraph_of(const LaplacianMatrix& l) {
  return WeightedDigraph::from_dependency_matrix(-l.values());
}

bool has_spanning_in_tree(const WeightedDigraph& g) {
  const std::size_t n = g.order();
  std::vector<std::vector<std::size_t>> in_adj(n);
  for (const Arc& a : g.arcs()) in_adj[a.to].push_back(a.from);
  for (std::size_t root = 0; root < n; ++root) {
    const auto seen = reaching(in_adj, root);
    if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) return true;
  }
  return false;
}

bool has_spanning_in_tree(const LaplacianMatrix& l) { return has_spanning_in_tree(digraph_of(l)); }

WeightedDigraph random_digraph(std::size_t n, std::uint64_t seed, double p) {
  std::mt19937_64 rng(seed);
  // 53-bit uniform in [0, 1); spelled out so the stream is identical on
  // every standard library.
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (unit() < p) arcs.push_back({i, j, 2.0 * (1.0 - unit())});
    }
  }
  return WeightedDigraph(n, std::move(arcs));
}

}  // namespace latent
