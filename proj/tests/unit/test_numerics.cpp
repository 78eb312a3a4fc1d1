#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ccnrank/autodiff.hpp"
#include "ccnrank/errors.hpp"
#include "ccnrank/gradcheck.hpp"
#include "ccnrank/hash.hpp"
#include "ccnrank/ops.hpp"
#include "ccnrank/random.hpp"
#include "ccnrank/rmsprop.hpp"

namespace ccnrank {
namespace {

Tensor random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Tensor t(Shape{r, c});
  for (double& v : t.data()) v = rng.uniform(-1.0, 1.0);
  return t;
}

Tensor naive_matmul(const Tensor& a, const Tensor& b) {
  Tensor out(Shape{a.dim(0), b.dim(1)});
  for (std::size_t i = 0; i < a.dim(0); ++i)
    for (std::size_t j = 0; j < b.dim(1); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.dim(1); ++k) s += a.at(i, k) * b.at(k, j);
      out.at(i, j) = s;
    }
  return out;
}

Tensor eval_matmul(const Tensor& a, const Tensor& b) {
  Graph g;
  return g.value(ops::matmul(g, g.constant(a), g.constant(b)));
}

TEST(Tensor, ShapesAndAccess) {
  const Tensor s;
  EXPECT_EQ(s.rank(), 0u);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_TRUE(s.is_scalar());
  const auto m = Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(m.at(1, 2), 6.0);
  EXPECT_EQ(m.shape_string(), "[2x3]");
  EXPECT_THROW(Tensor::matrix(2, 2, {1, 2, 3}), ShapeError);
  EXPECT_THROW(Tensor::vector({1, 2}).item(), ShapeError);
  EXPECT_FALSE(Tensor::vector({1, NAN}).all_finite());
}

TEST(Matmul, HandCase) {
  const auto a = Tensor::matrix(2, 2, {1, 2, 3, 4});
  const auto id = Tensor::matrix(2, 2, {1, 0, 0, 1});
  EXPECT_EQ(eval_matmul(a, id), a);
}

TEST(Matmul, IdentityAndZeroAreExact) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t r = 1 + rng.below(6), c = 1 + rng.below(6);
    const auto a = random_matrix(rng, r, c);
    Tensor id(Shape{c, c});
    for (std::size_t i = 0; i < c; ++i) id.at(i, i) = 1.0;
    Tensor left_id(Shape{r, r});
    for (std::size_t i = 0; i < r; ++i) left_id.at(i, i) = 1.0;
    EXPECT_EQ(eval_matmul(a, id), a);
    EXPECT_EQ(eval_matmul(left_id, a), a);
    EXPECT_EQ(eval_matmul(a, Tensor(Shape{c, 3})), Tensor(Shape{r, 3}));
    // (A I) I == A (I I)
    EXPECT_EQ(eval_matmul(eval_matmul(a, id), id), eval_matmul(a, eval_matmul(id, id)));
  }
}

TEST(Matmul, MatchesTripleLoopOracle) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_matrix(rng, 3, 4);
    const auto b = random_matrix(rng, 4, 2);
    const auto got = eval_matmul(a, b);
    const auto want = naive_matmul(a, b);
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  }
}

TEST(Matmul, ShapeMismatchNamesOperands) {
  Graph g;
  try {
    ops::matmul(g, g.constant(Tensor(Shape{2, 3})), g.constant(Tensor(Shape{2, 3})));
    FAIL();
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2x3]"), std::string::npos) << msg;
  }
}

TEST(Pointwise, Examples) {
  Graph g;
  EXPECT_EQ(g.value(ops::sigmoid(g, g.constant(Tensor::scalar(0.0)))).item(), 0.5);
  EXPECT_EQ(g.value(ops::tanh(g, g.constant(Tensor::scalar(0.0)))).item(), 0.0);
  const Var a = g.constant(Tensor::vector({1, 2}));
  const Var b = g.constant(Tensor::vector({3, 4}));
  EXPECT_EQ(g.value(ops::add(g, a, b)), Tensor::vector({4, 6}));
  const std::array<Var, 2> ab = {a, b};
  EXPECT_EQ(g.value(ops::pointwise(g, ops::Pointwise::kMul, ab)), Tensor::vector({3, 8}));
  const std::array<Var, 1> one = {a};
  EXPECT_EQ(g.value(ops::pointwise(g, ops::Pointwise::kScale, one, 3.0)), Tensor::vector({3, 6}));
  EXPECT_THROW(ops::pointwise(g, ops::Pointwise::kAdd, one), ContractError);
  EXPECT_THROW(ops::add(g, a, g.constant(Tensor::vector({1, 2, 3}))), ShapeError);
}

TEST(Pointwise, FiniteOnLargeMagnitudes) {
  for (double x = -50.0; x <= 50.0; x += 0.25) {
    Graph g;
    const Var v = g.constant(Tensor::scalar(x));
    const Var s = ops::sigmoid(g, v);
    const Var t = ops::tanh(g, v);
    EXPECT_TRUE(std::isfinite(g.value(s).item()));
    EXPECT_TRUE(std::isfinite(g.value(t).item()));
    g.backward(ops::add(g, s, t));
    EXPECT_TRUE(std::isfinite(g.grad(v).item()));
  }
  EXPECT_EQ(ops::sigmoid(-800.0), 0.0);
  EXPECT_EQ(ops::sigmoid(800.0), 1.0);
}

TEST(Backward, IdentityAndSigmoidDerivative) {
  ParameterSet params;
  params.add("w", Tensor::scalar(0.0));
  {
    Graph g;
    const Var w = g.param(params, "w");
    g.backward(w);
    EXPECT_EQ(params.grad("w").item(), 1.0);
  }
  params.zero_grad();
  {
    Graph g;
    g.backward(ops::sigmoid(g, g.param(params, "w")));
    EXPECT_EQ(params.grad("w").item(), 0.25);
  }
}

TEST(Backward, ReusedValueAccumulates) {
  ParameterSet params;
  params.add("w", Tensor::scalar(3.0));
  Graph g;
  const Var w = g.param(params, "w");
  g.backward(ops::add(g, w, w));
  EXPECT_EQ(params.grad("w").item(), 2.0);
  // A second backward adds again.
  g.backward(ops::mul(g, w, w));
  EXPECT_EQ(params.grad("w").item(), 8.0);
}

TEST(Backward, NonScalarTargetIsContractError) {
  Graph g;
  EXPECT_THROW(g.backward(g.constant(Tensor::vector({1, 2}))), ContractError);
}

TEST(Backward, ConstParameterReceivesNoGradient) {
  ParameterSet params;
  params.add("w", Tensor::scalar(2.0));
  const ParameterSet& frozen = params;
  Graph g;
  const Var w = g.param(frozen, "w");
  EXPECT_FALSE(g.requires_grad(w));
  g.backward(ops::mul(g, w, w));
  EXPECT_EQ(params.grad("w").item(), 0.0);
}

// Every differentiable op checked against central differences on random shapes.
struct OpCase {
  const char* name;
  std::function<Var(Graph&, Var, Var)> build;  // returns a scalar
  Shape a, b;
};

TEST(Ops, GradientsMatchFiniteDifferences) {
  auto sum = [](Graph& g, Var v) { return ops::sum(g, v); };
  // Weighted sum so that every output coordinate carries a distinct gradient.
  auto wsum = [](Graph& g, Var v) {
    const Tensor& t = g.value(v);
    Tensor w(t.shape());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.3 + 0.17 * static_cast<double>(i);
    return ops::sum(g, ops::mul(g, v, g.constant(w)));
  };
  const std::vector<OpCase> cases = {
      {"matmul", [&](Graph& g, Var a, Var b) { return wsum(g, ops::matmul(g, a, b)); }, {3, 4}, {4, 2}},
      {"matvec", [&](Graph& g, Var a, Var b) { return wsum(g, ops::matvec(g, a, b)); }, {3, 4}, {4}},
      {"transpose", [&](Graph& g, Var a, Var) { return wsum(g, ops::transpose(g, a)); }, {2, 5}, {1}},
      {"add", [&](Graph& g, Var a, Var b) { return wsum(g, ops::add(g, a, b)); }, {6}, {6}},
      {"sub", [&](Graph& g, Var a, Var b) { return wsum(g, ops::sub(g, a, b)); }, {2, 3}, {2, 3}},
      {"mul", [&](Graph& g, Var a, Var b) { return wsum(g, ops::mul(g, a, b)); }, {5}, {5}},
      {"scale", [&](Graph& g, Var a, Var) { return wsum(g, ops::scale(g, a, -1.7)); }, {4}, {1}},
      {"sigmoid", [&](Graph& g, Var a, Var) { return wsum(g, ops::sigmoid(g, a)); }, {7}, {1}},
      {"tanh", [&](Graph& g, Var a, Var) { return wsum(g, ops::tanh(g, a)); }, {3, 3}, {1}},
      {"sum", [&](Graph& g, Var a, Var) { return sum(g, ops::mul(g, a, a)); }, {4}, {1}},
      {"dot", [&](Graph& g, Var a, Var b) { return ops::dot(g, a, b); }, {6}, {6}},
      {"stack",
       [&](Graph& g, Var a, Var b) {
         const std::array<Var, 2> parts = {ops::dot(g, a, a), ops::sum(g, b)};
         return wsum(g, ops::stack(g, parts));
       },
       {3}, {2}},
  };
  Rng rng(17);
  for (const auto& c : cases) {
    for (int trial = 0; trial < 5; ++trial) {
      ParameterSet params;
      auto fill = [&](const Shape& s) {
        Tensor t(s);
        for (double& v : t.data()) v = rng.uniform(-1.5, 1.5);
        return t;
      };
      params.add("a", fill(c.a));
      params.add("b", fill(c.b));
      const auto report = finite_diff_check(
          [&](Graph& g, ParameterSet& p) { return c.build(g, g.param(p, "a"), g.param(p, "b")); },
          params);
      EXPECT_TRUE(report.passed) << c.name << " error " << report.max_relative_error;
      EXPECT_LT(report.max_relative_error, 1e-6) << c.name;
    }
  }
}

TEST(GradCheck, LinearLossIsExact) {
  ParameterSet params;
  params.add("w", Tensor::scalar(0.7));
  const auto report = finite_diff_check(
      [](Graph& g, ParameterSet& p) { return ops::scale(g, g.param(p, "w"), 3.0); }, params);
  EXPECT_TRUE(report.passed);
  EXPECT_LT(report.max_relative_error, 1e-9);
  EXPECT_EQ(report.coordinates_checked, 1u);
  EXPECT_EQ(params.value("w").item(), 0.7);
  EXPECT_EQ(params.grad("w").item(), 0.0);
}

TEST(GradCheck, QuadraticAtOne) {
  ParameterSet params;
  params.add("w", Tensor::scalar(1.0));
  const auto report = finite_diff_check(
      [](Graph& g, ParameterSet& p) {
        const Var w = g.param(p, "w");
        return ops::mul(g, w, w);
      },
      params);
  EXPECT_TRUE(report.passed);
  EXPECT_EQ(report.worst_analytic, 2.0);
  EXPECT_NEAR(report.worst_numeric, 2.0, 1e-8);
}

TEST(GradCheck, CorruptedGradientIsCaught) {
  ParameterSet params;
  params.add("w", Tensor::vector({0.3, -1.2, 2.0}));
  GradCheckOptions options;
  options.analytic_scale = 2.0;
  const auto report = finite_diff_check(
      [](Graph& g, ParameterSet& p) {
        const Var w = g.param(p, "w");
        return ops::dot(g, w, w);
      },
      params, options);
  EXPECT_FALSE(report.passed);
  EXPECT_NEAR(report.max_relative_error, 0.5, 1e-6);
  EXPECT_EQ(report.worst_parameter, "w");
}

TEST(GradCheck, SamplesAreBoundedPerParameter) {
  ParameterSet params;
  params.add("big", Tensor(Shape{10, 10}, 0.5));
  params.add("small", Tensor(Shape{3}, 0.5));
  GradCheckOptions options;
  options.samples_per_parameter = 7;
  const auto report = finite_diff_check(
      [](Graph& g, ParameterSet& p) {
        return ops::add(g, ops::sum(g, ops::tanh(g, g.param(p, "big"))),
                        ops::sum(g, ops::sigmoid(g, g.param(p, "small"))));
      },
      params, options);
  EXPECT_EQ(report.coordinates_checked, 10u);
  EXPECT_TRUE(report.passed);
}

TEST(RmsProp, FirstStepFromFormula) {
  ParameterSet params;
  params.add("w", Tensor::scalar(1.0));
  params.grad("w")[0] = 1.0;
  RmsPropState state;
  rmsprop_step(params, state);
  const double expected_step = 1e-3 / std::sqrt(0.1 + 1e-6);
  EXPECT_NEAR(expected_step, 3.16226e-3, 1e-8);
  EXPECT_DOUBLE_EQ(params.value("w").item(), 1.0 - expected_step);
  EXPECT_DOUBLE_EQ(state.accumulators.at("w").item(), 0.1);
  EXPECT_EQ(params.grad("w").item(), 0.0);
}

TEST(RmsProp, ZeroGradientIsIdentity) {
  Rng rng(4);
  ParameterSet params;
  params.add("m", random_matrix(rng, 3, 3));
  const ParameterSet before = params;
  RmsPropState state;
  for (int i = 0; i < 10; ++i) rmsprop_step(params, state);
  EXPECT_TRUE(params.values_equal(before));
}

TEST(RmsProp, FrozenParameterUnchanged) {
  ParameterSet params;
  params.add("w", Tensor::scalar(1.0), /*trainable=*/false);
  params.grad("w")[0] = 5.0;
  RmsPropState state;
  rmsprop_step(params, state);
  EXPECT_EQ(params.value("w").item(), 1.0);
}

TEST(ParameterSet, InsertionOrderAndErrors) {
  ParameterSet params;
  params.add("z", Tensor::scalar(1));
  params.add("a", Tensor::vector({1, 2}));
  EXPECT_EQ(params.names(), (std::vector<std::string>{"z", "a"}));
  EXPECT_EQ(params.scalar_count(), 3u);
  EXPECT_THROW(params.add("a", Tensor::scalar(0)), ContractError);
  EXPECT_THROW(params.value("missing"), ContractError);
}

TEST(Rng, ReproducibleStreams) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  Rng c(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(c.below(7), 7u);
  }
  EXPECT_NE(Rng::derive_seed(1, 1), Rng::derive_seed(1, 2));
  EXPECT_EQ(Rng::derive_seed(1, 1), Rng::derive_seed(1, 1));
}

TEST(Hash, KnownFnvValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(to_hex(0xabcULL), "0000000000000abc");
  EXPECT_EQ(from_hex("0000000000000abc"), 0xabcULL);
}

}  // namespace
}  // namespace ccnrank
