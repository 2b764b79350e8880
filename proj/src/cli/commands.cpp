#include "latent/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "latent/digraph.hpp"
#include "latent/error.hpp"
#include "latent/forests.hpp"
#include "latent/orthoproj.hpp"
#include "latent/protocols.hpp"
#include "latent/regularize.hpp"
#include "latent/spectra.hpp"
#include "latent/verify.hpp"

namespace latent::cli {

namespace {

using nlohmann::ordered_json;

constexpr double kCrossMethodTolerance = 1e-6;

struct GlobalOptions {
  std::string format;
  double tol = 1.0;
  std::string out_path;

  bool json(bool default_json) const { return format.empty() ? default_json : format == "json"; }
};

struct SystemSource {
  std::string graph_path;
  std::string matrix_path;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// {"matrix": [[...], ...]}
SquareMatrix parse_matrix_file(const std::string& path) {
  const std::string text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("matrix JSON '" + path + "': " + e.what());
  }
  if (!doc.is_object() || !doc.contains("matrix") || !doc["matrix"].is_array()) {
    throw ParseError("matrix JSON '" + path + "': expected {\"matrix\": [[...], ...]}");
  }
  const auto& rows = doc["matrix"];
  const auto n = static_cast<Index>(rows.size());
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != n) {
      throw ParseError("matrix JSON '" + path + "': matrix must be square");
    }
    for (Index j = 0; j < n; ++j) {
      const auto& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) throw ParseError("matrix JSON '" + path + "': entries must be numbers");
      m(i, j) = v.get<double>();
    }
  }
  return SquareMatrix(std::move(m));
}

std::optional<WeightedDigraph> load_graph(const SystemSource& src) {
  if (src.graph_path.empty()) return std::nullopt;
  try {
    return parse_digraph(read_file(src.graph_path));
  } catch (const ParseError& e) {
    throw ParseError("'" + src.graph_path + "': " + e.what());
  }
}

LaplacianMatrix load_laplacian(const SystemSource& src) {
  if (!src.matrix_path.empty()) return validate_laplacian(parse_matrix_file(src.matrix_path));
  if (src.graph_path.empty()) throw InvalidArgument("a graph file or --matrix-file is required");
  return laplacian(*load_graph(src));
}

// Discrete methods run on P = I - L, or on a stochastic --matrix-file.
StochasticMatrix load_stochastic(const SystemSource& src) {
  if (!src.matrix_path.empty()) return validate_stochastic(parse_matrix_file(src.matrix_path));
  const LaplacianMatrix l = load_laplacian(src);
  if (l.values().diagonal().maxCoeff() > 1.0) {
    throw InvalidArgument(
        "discrete methods use P = I - L, which needs every L_ii <= 1; rescale the arc weights "
        "or pass a stochastic --matrix-file");
  }
  return validate_stochastic(SquareMatrix(Matrix::Identity(l.order(), l.order()) - l.values()));
}

ConsensusSystem load_system(const SystemSource& src, Method m) {
  if (is_discrete(m)) return load_stochastic(src);
  return load_laplacian(src);
}

Vector to_vector(const std::vector<double>& values) {
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

void print_matrix(std::ostream& out, const Matrix& m, int decimals = 10) {
  const auto flags = out.flags();
  const auto precision = out.precision(decimals);
  out << std::fixed;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      // Avoid printing "-0.0000000000".
      const double v = std::abs(m(i, j)) < 0.5 * std::pow(10.0, -decimals) ? 0.0 : m(i, j);
      out << std::setw(decimals + 5) << v;
    }
    out << "\n";
  }
  out.flags(flags);
  out.precision(precision);
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

// ---------------------------------------------------------------------------

int cmd_laplacian(const GlobalOptions& g, const SystemSource& src, std::ostream& out) {
  const LaplacianMatrix l = load_laplacian(src);
  if (g.json(false)) {
    ordered_json doc;
    doc["order"] = l.order();
    doc["matrix"] = matrix_json(l.values());
    out << doc.dump() << "\n";
  } else {
    print_matrix(out, l.values(), 6);
  }
  return kExitOk;
}

int cmd_eigenprojection(const GlobalOptions& g, const SystemSource& src, const std::string& method,
                        const std::vector<double>& taus, std::ostream& out) {
  const LaplacianMatrix l = load_laplacian(src);
  std::vector<Eigenprojection> results;
  const bool all = method == "all";
  if (all || method == "algebraic") results.push_back(eigenprojection(l));
  if (all || method == "resolvent") {
    results.push_back(taus.empty() ? eigenprojection_resolvent(l)
                                   : eigenprojection_resolvent(l, taus));
  }
  if (all || method == "forest") {
    const auto graph = load_graph(src);
    results.push_back(forest_eigenprojection(graph ? *graph : digraph_of(l)));
  }

  double worst = 0.0;
  for (std::size_t a = 0; a < results.size(); ++a) {
    for (std::size_t b = a + 1; b < results.size(); ++b) {
      worst = std::max(worst, max_abs_diff(results[a].matrix.values(), results[b].matrix.values()));
    }
  }
  const double tolerance = kCrossMethodTolerance * g.tol;
  const bool agree = worst <= tolerance;

  if (g.json(false)) {
    ordered_json doc;
    ordered_json list = ordered_json::array();
    for (const Eigenprojection& ep : results) {
      ordered_json item;
      item["method"] = std::string(to_string(ep.method));
      item["matrix"] = matrix_json(ep.matrix.values());
      item["idempotency_residual"] = ep.idempotency_residual;
      item["commutation_residual"] = ep.commutation_residual;
      item["condition_number"] = ep.condition_number;
      item["converged"] = ep.converged;
      list.push_back(std::move(item));
    }
    doc["projections"] = std::move(list);
    if (results.size() > 1) {
      doc["max_pairwise_difference"] = worst;
      doc["tolerance"] = tolerance;
    }
    out << doc.dump() << "\n";
  } else {
    for (const Eigenprojection& ep : results) {
      out << "method: " << to_string(ep.method) << "  idempotency " << sci(ep.idempotency_residual)
          << "  commutation " << sci(ep.commutation_residual);
      if (ep.method == ProjectionMethod::algebraic) {
        out << "  condition " << sci(ep.condition_number);
      }
      if (ep.method == ProjectionMethod::resolvent_limit) {
        out << "  " << (ep.converged ? "converged" : "NOT converged");
      }
      out << "\n";
      print_matrix(out, ep.matrix.values());
    }
    if (results.size() > 1) {
      out << "agreement: max pairwise difference " << sci(worst) << " (tolerance "
          << sci(tolerance) << ") " << (agree ? "PASS" : "FAIL") << "\n";
    }
  }
  return agree ? kExitOk : kExitCheckFailed;
}

struct ConsensusArgs {
  std::string spec_path;
  std::string method;
  std::optional<double> delta;
  std::vector<double> v;
  std::vector<double> vtilde;
  std::vector<double> x0;
  bool simulate = false;
  std::string trajectory_path;
  double t_max = 10.0;
  int samples = 101;
};

RegularizationSpec spec_from(const ConsensusArgs& a) {
  if (!a.spec_path.empty()) {
    if (!a.method.empty()) throw InvalidArgument("give either --spec or --method, not both");
    return parse_regularization_spec(read_file(a.spec_path));
  }
  if (a.method.empty()) throw InvalidArgument("one of --spec or --method is required");
  RegularizationSpec spec;
  spec.method = parse_method(a.method);
  spec.delta = a.delta;
  if (!a.v.empty()) spec.v = to_vector(a.v);
  if (!a.vtilde.empty()) spec.vtilde = to_vector(a.vtilde);
  return spec;
}

void write_trajectory(const ConsensusSystem& system, const RegularizationSpec& spec,
                      const Vector& x0, const ConsensusArgs& a) {
  if (a.samples < 1) throw InvalidArgument("--samples must be positive");
  Trajectory traj;
  if (const auto* l = std::get_if<LaplacianMatrix>(&system)) {
    const Index n = l->order();
    std::optional<LaplacianMatrix> sim;
    Vector start = x0;
    if (spec.delta && spec.method == Method::background) {
      sim = background_laplacian(
          make_background(*l, *spec.delta, spec.v ? *spec.v : uniform_distribution(n)));
    } else if (spec.delta && spec.method == Method::hub_symmetric) {
      sim = hub_augment(make_hub(*l, *spec.delta, Vector::Constant(n, *spec.delta)));
    } else if (spec.delta && spec.method == Method::hub_subordinate) {
      Vector v = spec.v ? *spec.v
                        : subordinate_hub_strengths(spec.vtilde ? *spec.vtilde
                                                                : uniform_distribution(n),
                                                    *spec.delta);
      sim = hub_augment(make_hub(*l, *spec.delta, std::move(v)));
    } else {
      sim = *l;
      start = x0.head(n);
    }
    std::vector<double> times;
    for (int k = 0; k < a.samples; ++k) {
      times.push_back(a.samples == 1 ? 0.0 : a.t_max * k / (a.samples - 1));
    }
    traj = simulate_continuous(*sim, start, times);
  } else {
    const StochasticMatrix& p = std::get<StochasticMatrix>(system);
    const Index n = p.order();
    const Vector v = spec.v ? *spec.v : uniform_distribution(n);
    if (spec.delta && spec.method == Method::degroot_hub) {
      traj = simulate_discrete(degroot_hub_matrix(make_discrete(p, *spec.delta, v)), x0,
                               a.samples - 1);
    } else if (spec.delta && spec.method == Method::pagerank) {
      traj = simulate_discrete(pagerank_matrix(make_discrete(p, *spec.delta, v)), x0,
                               a.samples - 1);
    } else {
      traj = simulate_discrete(p, x0.head(n), a.samples - 1);
    }
  }
  std::ofstream file(a.trajectory_path);
  if (!file) throw InvalidArgument("cannot write trajectory file '" + a.trajectory_path + "'");
  write_trajectory_csv(traj, file);
}

int cmd_consensus(const GlobalOptions& g, const SystemSource& src, const ConsensusArgs& a,
                  std::ostream& out) {
  const RegularizationSpec spec = spec_from(a);
  if (a.x0.empty()) throw InvalidArgument("--x0 is required");
  const ConsensusSystem system = load_system(src, spec.method);
  const Vector x0 = to_vector(a.x0);
  const ConsensusReport report = latent_consensus(system, spec, x0, {a.simulate});
  if (!a.trajectory_path.empty()) write_trajectory(system, spec, x0, a);

  if (g.json(true)) {
    out << to_json(report) << "\n";
  } else {
    out << "method: " << report.method << "\n";
    if (report.delta_used) out << "delta: " << *report.delta_used << "\n";
    out << "weights:";
    out << std::setprecision(12);
    for (Index i = 0; i < report.weights.size(); ++i) out << " " << report.weights(i);
    out << "\nvalue: ";
    if (report.value) {
      out << *report.value;
    } else {
      out << "none (no genuine consensus)";
    }
    out << "\n";
    for (const auto& [name, v] : report.diagnostics) out << "  " << name << " = " << sci(v) << "\n";
  }
  return kExitOk;
}

int cmd_verify(const GlobalOptions& g, const SystemSource& src,
               const std::vector<std::uint64_t>& random, std::ostream& out) {
  std::vector<CheckResult> checks;
  std::optional<LaplacianMatrix> l;
  if (!random.empty()) {
    if (!src.graph_path.empty() || !src.matrix_path.empty()) {
      throw InvalidArgument("--random cannot be combined with a graph or matrix file");
    }
    if (random[0] < 1) throw InvalidArgument("--random needs n >= 1");
    l = laplacian(random_digraph(static_cast<std::size_t>(random[0]), random[1]));
  } else {
    try {
      l = load_laplacian(src);
    } catch (const LaplacianError& e) {
      checks.push_back({"laplacian_class", std::nan(""), 0.0, CheckStatus::fail, e.what()});
    }
  }
  if (l) {
    checks.push_back({"laplacian_class", 0.0, 0.0, CheckStatus::pass, ""});
    auto battery = run_identity_battery(*l, g.tol);
    checks.insert(checks.end(), battery.begin(), battery.end());
  }
  const bool ok = all_passed(checks);

  if (g.json(false)) {
    ordered_json doc;
    ordered_json list = ordered_json::array();
    for (const CheckResult& c : checks) {
      ordered_json item;
      item["name"] = c.name;
      item["residual"] = std::isfinite(c.residual) ? ordered_json(c.residual) : ordered_json(nullptr);
      item["tolerance"] = c.tolerance;
      item["status"] = to_string(c.status);
      if (!c.note.empty()) item["note"] = c.note;
      list.push_back(std::move(item));
    }
    doc["checks"] = std::move(list);
    doc["passed"] = ok;
    out << doc.dump() << "\n";
  } else {
    out << std::left << std::setw(32) << "check" << std::setw(12) << "residual" << std::setw(12)
        << "tolerance"
        << "status\n";
    for (const CheckResult& c : checks) {
      out << std::left << std::setw(32) << c.name << std::setw(12)
          << (std::isfinite(c.residual) ? sci(c.residual) : std::string("-")) << std::setw(12)
          << sci(c.tolerance) << to_string(c.status);
      if (!c.note.empty()) out << "  (" << c.note << ")";
      out << "\n";
    }
    out << (ok ? "all checks passed" : "verification FAILED") << "\n";
  }
  return ok ? kExitOk : kExitCheckFailed;
}

struct SweepArgs {
  std::string method;
  std::vector<double> deltas;
  std::vector<double> x0;
  std::vector<double> v;
  std::vector<double> vtilde;
  bool with_limit = false;
};

int cmd_sweep(const SystemSource& src, const SweepArgs& a, std::ostream& out) {
  RegularizationSpec base;
  base.method = parse_method(a.method);
  if (base.method == Method::orthoproj) {
    throw InvalidArgument("orthoproj has no regularization strength to sweep");
  }
  const ConsensusSystem system = load_system(src, base.method);
  const Index n = std::visit([](const auto& s) { return s.order(); }, system);
  if (!a.v.empty()) base.v = to_vector(a.v);
  if (!a.vtilde.empty()) base.vtilde = to_vector(a.vtilde);
  if (base.method == Method::hub_subordinate && !base.v && !base.vtilde) {
    base.vtilde = uniform_distribution(n);
  }
  const std::vector<double> deltas = a.deltas.empty() ? default_delta_schedule() : a.deltas;

  const Index width = has_hub(base.method) ? n + 1 : n;
  const bool with_value = !a.x0.empty();
  const Vector x0 = with_value ? to_vector(a.x0) : Vector::Zero(width);

  RegularizationSpec limit_spec = base;
  limit_spec.delta.reset();
  const ConsensusReport limit = latent_consensus(system, limit_spec, x0);

  out << "delta";
  for (Index j = 0; j < n; ++j) out << ",w" << j + 1;
  if (width > n) out << ",w_hub";
  if (with_value) out << ",value";
  out << ",limit_distance\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);

  auto emit = [&](const std::string& label, const ConsensusReport& r) {
    out << label;
    for (Index j = 0; j < r.weights.size(); ++j) out << "," << r.weights(j);
    if (with_value) out << "," << (r.value ? *r.value : std::nan(""));
    out << "," << (r.weights - limit.weights).cwiseAbs().maxCoeff() << "\n";
  };
  for (double delta : deltas) {
    RegularizationSpec spec = base;
    spec.delta = delta;
    std::ostringstream label;
    label << std::setprecision(17) << delta;
    emit(label.str(), latent_consensus(system, spec, x0));
  }
  if (a.with_limit) emit("limit", limit);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Latent consensus toolkit: eigenprojections, regularization protocols and "
               "identity checks for multi-agent consensus",
               "lctool"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--tol", g.tol, "Multiplier applied to every tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out_path, "Write output to this file instead of stdout");

  SystemSource src;
  auto add_source = [&src](CLI::App* sub, bool graph_required) {
    auto* opt = sub->add_option("graph", src.graph_path, "Graph JSON file");
    if (graph_required) opt->required();
    sub->add_option("--matrix-file", src.matrix_path, "Matrix JSON file {\"matrix\": [[...]]}");
  };

  auto* lap = app.add_subcommand("laplacian", "Print the Laplacian of a graph");
  add_source(lap, false);

  std::string ep_method = "algebraic";
  std::vector<double> taus;
  auto* eig = app.add_subcommand("eigenprojection", "Eigenprojection of the Laplacian");
  add_source(eig, false);
  eig->add_option("--method", ep_method, "algebraic|resolvent|forest|all")
      ->check(CLI::IsMember({"algebraic", "resolvent", "forest", "all"}));
  eig->add_option("--tau", taus, "Resolvent schedule (comma separated)")->delimiter(',');

  ConsensusArgs ca;
  auto* con = app.add_subcommand("consensus", "Latent consensus report");
  add_source(con, false);
  con->add_option("--spec", ca.spec_path, "Regularization spec JSON file");
  con->add_option("--method", ca.method,
                  "hub-symmetric|hub-subordinate|background|degroot-hub|pagerank|orthoproj");
  con->add_option("--delta", ca.delta, "Regularization strength (omit for the limit)");
  con->add_option("--v", ca.v, "Influence vector")->delimiter(',');
  con->add_option("--vtilde", ca.vtilde, "Limit direction of hub strengths")->delimiter(',');
  con->add_option("--x0", ca.x0, "Initial state (hub state last for hub methods)")
      ->delimiter(',');
  con->add_flag("--simulate", ca.simulate, "Add a simulated-trajectory residual");
  con->add_option("--trajectory", ca.trajectory_path, "Write the simulated trajectory as CSV");
  con->add_option("--t-max", ca.t_max, "Trajectory horizon (continuous)");
  con->add_option("--samples", ca.samples, "Trajectory samples");

  std::vector<std::uint64_t> random;
  auto* ver = app.add_subcommand("verify", "Run the identity battery");
  add_source(ver, false);
  ver->add_option("--random", random, "Random graph: n seed")->expected(2);

  SweepArgs sa;
  auto* swp = app.add_subcommand("sweep", "Weights and value along a delta schedule (CSV)");
  add_source(swp, false);
  swp->add_option("--method", sa.method, "Regularization method")->required();
  swp->add_option("--deltas", sa.deltas, "Delta schedule (comma separated)")->delimiter(',');
  swp->add_option("--x0", sa.x0, "Initial state")->delimiter(',');
  swp->add_option("--v", sa.v, "Influence vector")->delimiter(',');
  swp->add_option("--vtilde", sa.vtilde, "Limit direction of hub strengths")->delimiter(',');
  swp->add_flag("--with-limit", sa.with_limit, "Append the delta -> 0 limit row");

  std::vector<std::string> argv_storage{"lctool"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_storage) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::ostringstream buffer;
  int code = kExitOk;
  try {
    if (lap->parsed()) {
      code = cmd_laplacian(g, src, buffer);
    } else if (eig->parsed()) {
      code = cmd_eigenprojection(g, src, ep_method, taus, buffer);
    } else if (con->parsed()) {
      code = cmd_consensus(g, src, ca, buffer);
    } else if (ver->parsed()) {
      code = cmd_verify(g, src, random, buffer);
    } else if (swp->parsed()) {
      code = cmd_sweep(src, sa, buffer);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (g.out_path.empty()) {
    out << buffer.str();
  } else {
    std::ofstream file(g.out_path);
    if (!file) {
      err << "error: cannot write '" << g.out_path << "'\n";
      return kExitUsage;
    }
    file << buffer.str();
  }
  return code;
}

}  // namespace latent::cli
