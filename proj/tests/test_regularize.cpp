#include <gtest/gtest.h>

#include <cmath>

#include "latent/error.hpp"
#include "latent/forests.hpp"
#include "latent/regularize.hpp"
#include "latent/spectra.hpp"
#include "support/oracles.hpp"

using namespace latent;

namespace {

LaplacianMatrix two_blocks_l() { return laplacian(oracle::two_blocks()); }

Matrix two_cycle() {
  Matrix p(2, 2);
  p << 0, 1, 1, 0;
  return p;
}

Matrix row_of(double a, double b, double c, double d, double e) {
  Matrix r(1, 5);
  r << a, b, c, d, e;
  return r;
}

}  // namespace

TEST(HubAugment, SingleVertex) {
  const LaplacianMatrix zero = validate_laplacian(SquareMatrix::zero(1));
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  EXPECT_EQ(hub_augment(make_hub(zero, 1.0, Vector::Ones(1))).values(), expected);
}

TEST(HubAugment, BlockLayoutAndInTree) {
  const LaplacianMatrix l = two_blocks_l();
  const LaplacianMatrix a = hub_augment(make_hub(l, 0.1, Vector::Constant(4, 0.1)));
  EXPECT_EQ(a.order(), 5);
  EXPECT_LE(a.values().rowwise().sum().cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_TRUE(has_spanning_in_tree(a));
  oracle::Gen gen(4);
  for (int trial = 0; trial < 30; ++trial) {
    const LaplacianMatrix r = laplacian(gen.digraph(static_cast<std::size_t>(gen.integer(1, 6))));
    Vector v(r.order());
    for (Index i = 0; i < v.size(); ++i) v(i) = gen.uniform(0.0, 1.0) < 0.5 ? 0.0 : 1.0;
    EXPECT_TRUE(has_spanning_in_tree(hub_augment(make_hub(r, gen.uniform(0.01, 2.0), v))));
  }
}

TEST(HubAugment, RejectsInvalidParameters) {
  const LaplacianMatrix l = two_blocks_l();
  EXPECT_THROW(make_hub(l, 0.0, Vector::Ones(4)), InvalidArgument);
  EXPECT_THROW(make_hub(l, 1.0, Vector::Ones(3)), InvalidArgument);
  EXPECT_THROW(make_hub(l, 1.0, -Vector::Ones(4)), InvalidArgument);
}

TEST(HubEigenprojection, SymmetricTwoAgentSystem) {
  const LaplacianMatrix zero = validate_laplacian(SquareMatrix::zero(1));
  EXPECT_LE(oracle::max_abs_diff(hub_eigenprojection(make_hub(zero, 1.0, Vector::Ones(1))).values(),
                                 Matrix::Constant(2, 2, 0.5)),
            1e-15);
}

TEST(HubEigenprojection, ClosedFormMatchesAssembled) {
  const HubAugmentation h = make_hub(two_blocks_l(), 0.1, Vector::Constant(4, 0.1));
  const Matrix closed = hub_eigenprojection(h).values();
  EXPECT_LE(oracle::max_abs_diff(closed, eigenprojection(hub_augment(h)).matrix.values()), 1e-9);
  EXPECT_LE(oracle::max_abs_diff(closed, oracle::rank_one_projection(hub_augment(h).values())),
            1e-9);
}

TEST(HubEigenprojection, SymmetricRowFormula) {
  // v = delta 1: rows (1/(n+1)) [1^T (I + L/delta)^{-1}, 1].
  const LaplacianMatrix l = two_blocks_l();
  for (double delta : {0.5, 0.05}) {
    const Matrix inv = (Matrix::Identity(4, 4) + l.values() / delta).inverse();
    Matrix row(1, 5);
    row.leftCols(4) = Vector::Ones(4).transpose() * inv / 5.0;
    row(0, 4) = 0.2;
    const Matrix closed = hub_eigenprojection(make_hub(l, delta, Vector::Constant(4, delta))).values();
    EXPECT_LE(oracle::max_abs_diff(closed, Matrix::Ones(5, 1) * row), 1e-13);
  }
}

TEST(HubEigenprojection, RandomTriplesAgreeWithOracle) {
  oracle::Gen gen(31);
  for (int trial = 0; trial < 30; ++trial) {
    const LaplacianMatrix l = laplacian(gen.digraph(static_cast<std::size_t>(gen.integer(1, 6))));
    Vector v(l.order());
    for (Index i = 0; i < v.size(); ++i) v(i) = gen.uniform(0.0, 1.5);
    const HubAugmentation h = make_hub(l, gen.uniform(1e-3, 2.0), v);
    EXPECT_LE(oracle::max_abs_diff(hub_eigenprojection(h).values(),
                                   oracle::rank_one_projection(hub_augment(h).values())),
              1e-8);
  }
}

TEST(SymmetricHubLimit, Examples) {
  EXPECT_LE(oracle::max_abs_diff(symmetric_hub_limit(two_blocks_l()).values(),
                                 Matrix::Ones(5, 1) * row_of(1.5, 0.5, 1.6, 0.4, 1.0) / 5.0),
            1e-12);
  const LaplacianMatrix zero = validate_laplacian(SquareMatrix::zero(2));
  EXPECT_LE(oracle::max_abs_diff(symmetric_hub_limit(zero).values(), Matrix::Constant(3, 3, 1.0 / 3)),
            1e-15);
}

TEST(SymmetricHubLimit, HubWeightIsExactlyOneOverNPlusOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const LaplacianMatrix l = laplacian(random_digraph(1 + seed % 7, seed));
    const Index n = l.order();
    const double expected = 1.0 / static_cast<double>(n + 1);
    EXPECT_EQ(symmetric_hub_limit(l).values()(0, n), expected);
    for (double delta : {1.0, 1e-2, 1e-4}) {
      const Matrix w = hub_eigenprojection(make_hub(l, delta, Vector::Constant(n, delta))).values();
      for (Index i = 0; i <= n; ++i) EXPECT_EQ(w(i, n), expected);
    }
  }
}

TEST(SymmetricHubLimit, IsTheSmallDeltaLimit) {
  const LaplacianMatrix l = two_blocks_l();
  const Matrix w = hub_eigenprojection(make_hub(l, 1e-9, Vector::Constant(4, 1e-9))).values();
  EXPECT_LE(oracle::max_abs_diff(w, symmetric_hub_limit(l).values()), 1e-7);
}

TEST(SubordinateHubLimit, Examples) {
  EXPECT_LE(oracle::max_abs_diff(subordinate_hub_limit(two_blocks_l(), uniform_distribution(4)).values(),
                                 Matrix::Ones(5, 1) * row_of(0.375, 0.125, 0.4, 0.1, 0.0)),
            1e-12);
  const LaplacianMatrix zero = validate_laplacian(SquareMatrix::zero(3));
  Matrix expected = Matrix::Zero(4, 4);
  expected.col(0).setOnes();
  EXPECT_LE(oracle::max_abs_diff(subordinate_hub_limit(zero, Vector::Unit(3, 0)).values(), expected),
            1e-15);
}

// With s = sqrt(delta) the hub keeps delta / (s + delta), about sqrt(delta),
// so the distance to the limit shrinks like sqrt(delta) and no faster.
TEST(SubordinateHubLimit, SqrtScheduleConverges) {
  const LaplacianMatrix l = two_blocks_l();
  const Vector vt = uniform_distribution(4);
  const Matrix limit = subordinate_hub_limit(l, vt).values();
  double previous = INFINITY;
  for (double delta : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const Vector v = subordinate_hub_strengths(vt, delta);
    EXPECT_LE(oracle::max_abs_diff(v, std::sqrt(delta) * vt), 1e-18);
    const double d = oracle::max_abs_diff(hub_eigenprojection(make_hub(l, delta, v)).values(), limit);
    EXPECT_LT(d, previous);
    EXPECT_LE(d, 2.0 * std::sqrt(delta));
    previous = d;
  }
}

TEST(BackgroundLaplacian, Examples) {
  const LaplacianMatrix l = two_blocks_l();
  const Matrix k = Matrix::Identity(4, 4) - Matrix::Constant(4, 4, 0.25);
  EXPECT_LE(oracle::max_abs_diff(
                background_laplacian(make_background(l, 0.3, uniform_distribution(4))).values(),
                l.values() + 0.3 * k),
            1e-15);
  const LaplacianMatrix zero = validate_laplacian(SquareMatrix::zero(4));
  EXPECT_LE(oracle::max_abs_diff(
                background_laplacian(make_background(zero, 2.0, uniform_distribution(4))).values(),
                2.0 * k),
            1e-15);
  EXPECT_TRUE(has_spanning_in_tree(
      background_laplacian(make_background(l, 0.01, uniform_distribution(4)))));
}

TEST(BackgroundEigenprojection, Examples) {
  const LaplacianMatrix zero = validate_laplacian(SquareMatrix::zero(3));
  Vector v(3);
  v << 0.2, 0.3, 0.5;
  EXPECT_LE(oracle::max_abs_diff(background_eigenprojection(make_background(zero, 0.7, v)).values(),
                                 Vector::Ones(3) * v.transpose()),
            1e-15);
  const BackgroundAugmentation b = make_background(two_blocks_l(), 0.1, uniform_distribution(4));
  EXPECT_LE(oracle::max_abs_diff(background_eigenprojection(b).values(),
                                 eigenprojection(background_laplacian(b)).matrix.values()),
            1e-9);
}

TEST(BackgroundEigenprojection, RandomTriplesAgreeWithOracle) {
  oracle::Gen gen(32);
  for (int trial = 0; trial < 30; ++trial) {
    const LaplacianMatrix l = laplacian(gen.digraph(static_cast<std::size_t>(gen.integer(1, 6))));
    const BackgroundAugmentation b =
        make_background(l, gen.uniform(1e-3, 2.0), gen.distribution(l.order()));
    EXPECT_LE(oracle::max_abs_diff(background_eigenprojection(b).values(),
                                   oracle::rank_one_projection(background_laplacian(b).values())),
              1e-8);
  }
}

TEST(BackgroundLimit, Examples) {
  Matrix row(1, 4);
  row << 0.375, 0.125, 0.4, 0.1;
  EXPECT_LE(oracle::max_abs_diff(background_limit(two_blocks_l(), uniform_distribution(4)).values(),
                                 Matrix::Ones(4, 1) * row),
            1e-12);
  const LaplacianMatrix zero = validate_laplacian(SquareMatrix::zero(2));
  Vector v(2);
  v << 0.3, 0.7;
  EXPECT_LE(oracle::max_abs_diff(background_limit(zero, v).values(), Vector::Ones(2) * v.transpose()),
            1e-15);
  EXPECT_THROW(background_limit(zero, Vector::Ones(2)), InvalidArgument);
}

TEST(BackgroundLimit, IsTheSmallDeltaLimit) {
  oracle::Gen gen(33);
  for (int trial = 0; trial < 10; ++trial) {
    const LaplacianMatrix l = laplacian(gen.digraph(static_cast<std::size_t>(gen.integer(2, 6))));
    const Vector v = gen.distribution(l.order());
    const Matrix w = background_eigenprojection(make_background(l, 1e-9, v)).values();
    EXPECT_LE(oracle::max_abs_diff(w, background_limit(l, v).values()), 1e-6);
  }
}

TEST(DegrootHub, MatrixExamples) {
  const StochasticMatrix one = validate_stochastic(SquareMatrix::identity(1));
  Matrix expected(2, 2);
  expected << 0.5, 0.5, 1, 0;
  EXPECT_EQ(degroot_hub_matrix(make_discrete(one, 0.5, Vector::Ones(1))).values(), expected);

  const StochasticMatrix cyc = validate_stochastic(SquareMatrix(two_cycle()));
  const Matrix q = degroot_hub_matrix(make_discrete(cyc, 0.5, uniform_distribution(2))).values();
  EXPECT_GT((q * q).col(2).minCoeff(), 0.0);
  EXPECT_LE((q.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-15);

  Vector zero_entry(2);
  zero_entry << 1.0, 0.0;
  EXPECT_THROW(degroot_hub_matrix(make_discrete(cyc, 0.5, zero_entry)), InvalidArgument);
  EXPECT_THROW(make_discrete(cyc, 0.0, uniform_distribution(2)), InvalidArgument);
  EXPECT_THROW(make_discrete(cyc, 1.5, uniform_distribution(2)), InvalidArgument);
}

TEST(DegrootHub, EigenprojectionExamples) {
  const StochasticMatrix one = validate_stochastic(SquareMatrix::identity(1));
  Matrix expected(2, 2);
  expected << 2.0 / 3, 1.0 / 3, 2.0 / 3, 1.0 / 3;
  const DiscreteRegularization d = make_discrete(one, 0.5, Vector::Ones(1));
  EXPECT_LE(oracle::max_abs_diff(degroot_hub_eigenprojection(d).values(), expected), 1e-15);
  Vector x(2);
  x << 1.0, 0.0;
  EXPECT_LE((oracle::power_iterate(degroot_hub_matrix(d).values(), x, 200) -
             expected.row(0).transpose())
                .cwiseAbs()
                .maxCoeff(),
            1e-12);

  const StochasticMatrix cyc = validate_stochastic(SquareMatrix(two_cycle()));
  const Matrix w =
      degroot_hub_eigenprojection(make_discrete(cyc, 1e-6, uniform_distribution(2))).values();
  EXPECT_NEAR(w(0, 0), 0.5, 1e-5);
  EXPECT_NEAR(w(0, 1), 0.5, 1e-5);
}

TEST(DegrootHub, ClosedFormMatchesPowerIteration) {
  oracle::Gen gen(40);
  for (int trial = 0; trial < 30; ++trial) {
    const LaplacianMatrix l = laplacian(gen.digraph(static_cast<std::size_t>(gen.integer(1, 6))));
    const StochasticMatrix p = validate_stochastic(SquareMatrix(oracle::stochastic_from(l.values())));
    const Index n = p.order();
    const DiscreteRegularization d = make_discrete(p, gen.uniform(0.2, 1.0), gen.distribution(n));
    const Matrix q = degroot_hub_matrix(d).values();
    const Matrix closed = degroot_hub_eigenprojection(d).values();
    EXPECT_LE(oracle::max_abs_diff(closed,
                                   oracle::rank_one_projection(Matrix::Identity(n + 1, n + 1) - q)),
              1e-8);
    Vector x = Vector::Zero(n + 1);
    x(n) = 1.0;
    EXPECT_LE((oracle::power_iterate(q, x, 5000) - closed.row(0).transpose()).cwiseAbs().maxCoeff(),
              1e-8);
  }
}

TEST(DegrootHub, LimitForm) {
  const LaplacianMatrix l = two_blocks_l();
  const Matrix pm = oracle::stochastic_from(l.values());
  const StochasticMatrix p = validate_stochastic(SquareMatrix(pm));
  const Vector v = uniform_distribution(4);
  const Matrix limit = degroot_hub_limit(p, v).values();
  // (I - P)^- equals the eigenprojection of L since I - P = L / 4.
  Matrix row(1, 5);
  row << 0.375, 0.125, 0.4, 0.1, 0.0;
  EXPECT_LE(oracle::max_abs_diff(limit, Matrix::Ones(5, 1) * row), 1e-12);
  const Matrix small = degroot_hub_eigenprojection(make_discrete(p, 1e-8, v)).values();
  EXPECT_LE(oracle::max_abs_diff(small, limit), 1e-6);
}

TEST(Pagerank, MatrixExamples) {
  const StochasticMatrix cyc = validate_stochastic(SquareMatrix(two_cycle()));
  Vector v(2);
  v << 0.3, 0.7;
  EXPECT_LE(oracle::max_abs_diff(pagerank_matrix(make_discrete(cyc, 1.0, v)).values(),
                                 Vector::Ones(2) * v.transpose()),
            1e-15);
  const Matrix m = pagerank_matrix(make_discrete(cyc, 0.15, uniform_distribution(2))).values();
  EXPECT_GT(m.minCoeff(), 0.0);
  EXPECT_LE((m.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-15);
}

TEST(Pagerank, ClosedFormMatchesPowerIteration) {
  oracle::Gen gen(41);
  for (int trial = 0; trial < 30; ++trial) {
    const LaplacianMatrix l = laplacian(gen.digraph(static_cast<std::size_t>(gen.integer(1, 6))));
    const StochasticMatrix p = validate_stochastic(SquareMatrix(oracle::stochastic_from(l.values())));
    const Index n = p.order();
    const DiscreteRegularization d = make_discrete(p, gen.uniform(0.1, 1.0), gen.distribution(n));
    const Matrix closed = pagerank_eigenprojection(d).values();
    const Matrix m = pagerank_matrix(d).values();
    EXPECT_LE(oracle::max_abs_diff(closed, oracle::rank_one_projection(Matrix::Identity(n, n) - m)),
              1e-8);
    EXPECT_LE((oracle::power_iterate(m, d.v, 2000) - closed.row(0).transpose()).cwiseAbs().maxCoeff(),
              1e-8);
  }
}

TEST(Pagerank, LimitAgreesWithBackgroundLimit) {
  oracle::Gen gen(42);
  for (int trial = 0; trial < 20; ++trial) {
    const LaplacianMatrix l0 = laplacian(gen.digraph(static_cast<std::size_t>(gen.integer(1, 6))));
    const StochasticMatrix p = validate_stochastic(SquareMatrix(oracle::stochastic_from(l0.values())));
    const Vector v = gen.distribution(p.order());
    EXPECT_LE(oracle::max_abs_diff(pagerank_limit(p, v).values(),
                                   background_limit(laplacian_of(p), v).values()),
              1e-10);
  }
}

TEST(LaplacianOf, IsIdentityMinusP) {
  const StochasticMatrix cyc = validate_stochastic(SquareMatrix(two_cycle()));
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  EXPECT_EQ(laplacian_of(cyc).values(), expected);
}

TEST(ConformingPairs, SatisfyPreconditions) {
  oracle::Gen gen(50);
  for (int trial = 0; trial < 20; ++trial) {
    const LaplacianMatrix l = laplacian(gen.digraph(static_cast<std::size_t>(gen.integer(1, 6))));
    const Index n = l.order();
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = gen.uniform(0.0, 1.0);
    const ConformingPair hub = hub_pair(l, v);
    const ConformingPair bg = background_pair(l, gen.distribution(n));
    EXPECT_NO_THROW(require_conforming_pair(hub.a, hub.c));
    EXPECT_NO_THROW(require_conforming_pair(bg.a, bg.c));
    // A + delta C reassembles the regularized Laplacians.
    EXPECT_LE(oracle::max_abs_diff(hub.a.values() + 0.3 * hub.c.values(),
                                   hub_augment(make_hub(l, 0.3, v)).values()),
              1e-15);
  }
}

TEST(LaplacianPairIdentity, Examples) {
  const LaplacianMatrix zero = validate_laplacian(SquareMatrix::zero(3));
  EXPECT_EQ(laplacian_pair_identity_residual(zero, zero, 0.5), 0.0);
  oracle::Gen gen(51);
  for (int trial = 0; trial < 15; ++trial) {
    const LaplacianMatrix l = laplacian(gen.digraph(static_cast<std::size_t>(gen.integer(1, 6))));
    const Index n = l.order();
    const ConformingPair hub = hub_pair(l, Vector::Constant(n, gen.uniform(0.05, 1.0)));
    const ConformingPair bg = background_pair(l, gen.distribution(n));
    EXPECT_LE(laplacian_pair_identity_residual(validate_laplacian(hub.a), validate_laplacian(hub.c), 0.3),
              1e-8);
    EXPECT_LE(laplacian_pair_identity_residual(validate_laplacian(bg.a), validate_laplacian(bg.c), 0.7),
              1e-8);
  }
}

TEST(RegularizationSpec, MethodNames) {
  for (Method m : {Method::hub_symmetric, Method::hub_subordinate, Method::background,
                   Method::degroot_hub, Method::pagerank, Method::orthoproj}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_method("hub"), ParseError);
  EXPECT_TRUE(is_discrete(Method::pagerank));
  EXPECT_FALSE(is_discrete(Method::background));
  EXPECT_TRUE(has_hub(Method::degroot_hub));
  EXPECT_FALSE(has_hub(Method::pagerank));
}

TEST(RegularizationSpec, JsonRoundTrip) {
  const RegularizationSpec s =
      parse_regularization_spec(R"({"method":"background","delta":null,"v":[0.5,0.5],"vtilde":null})");
  EXPECT_EQ(s.method, Method::background);
  EXPECT_FALSE(s.delta);
  ASSERT_TRUE(s.v);
  EXPECT_EQ(*s.v, Vector::Constant(2, 0.5));
  EXPECT_FALSE(s.vtilde);
  EXPECT_EQ(serialize_regularization_spec(s),
            R"({"method":"background","delta":null,"v":[0.5,0.5],"vtilde":null})");

  const RegularizationSpec t = parse_regularization_spec(R"({"method":"pagerank","delta":0.15})");
  EXPECT_EQ(*t.delta, 0.15);
  const RegularizationSpec u = parse_regularization_spec(serialize_regularization_spec(t));
  EXPECT_EQ(u.method, Method::pagerank);
  EXPECT_EQ(*u.delta, 0.15);
}

TEST(RegularizationSpec, RejectsMalformed) {
  EXPECT_THROW(parse_regularization_spec("{"), ParseError);
  EXPECT_THROW(parse_regularization_spec(R"({"delta":1})"), ParseError);
  EXPECT_THROW(parse_regularization_spec(R"({"method":"nope"})"), ParseError);
  EXPECT_THROW(parse_regularization_spec(R"({"method":"pagerank","delta":"x"})"), ParseError);
  EXPECT_THROW(parse_regularization_spec(R"({"method":"pagerank","delta":-1})"), ParseError);
  EXPECT_THROW(parse_regularization_spec(R"({"method":"pagerank","v":[1,"a"]})"), ParseError);
}
