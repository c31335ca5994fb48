#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "sos/errors.hpp"
#include "sos/poly.hpp"
#include "test_support.hpp"

namespace sos {
namespace {

using test::cst;
using test::var;

Monomial mono(std::vector<Monomial::Factor> f) { return Monomial(std::move(f)); }

TEST(Monomial, CanonicalFactorsAreSortedAndPositive) {
  Monomial m = mono({{3, 1}, {0, 2}, {3, 2}, {1, 0}});
  ASSERT_EQ(m.factors().size(), 2u);
  EXPECT_EQ(m.factors()[0], (Monomial::Factor{0, 2}));
  EXPECT_EQ(m.factors()[1], (Monomial::Factor{3, 3}));
  EXPECT_EQ(m.degree(), 5);
  EXPECT_TRUE(Monomial().is_constant());
}

TEST(Polynomial, CancellationLeavesNoZeroTerms) {
  Polynomial p = (var(1, 0) + cst(1, 1.0)) + (-var(1, 0));
  EXPECT_EQ(p, cst(1, 1.0));
  EXPECT_EQ(p.terms().size(), 1u);
}

TEST(Polynomial, DifferenceOfSquares) {
  Polynomial p = (var(2, 0) - var(2, 1)) * (var(2, 0) + var(2, 1));
  Polynomial expected = var(2, 0) * var(2, 0) - var(2, 1) * var(2, 1);
  EXPECT_EQ(p, expected);
  EXPECT_EQ(p.terms().size(), 2u);
}

TEST(Polynomial, ProductCoefficientsMatchHandExpansionAndEvaluation) {
  Polynomial a = var(2, 0) * var(2, 0) + 2.0 * var(2, 1);
  Polynomial b = 3.0 * var(2, 0);
  Polynomial ab = arith(a, b, ArithKind::mul);
  EXPECT_DOUBLE_EQ(ab.coefficient(Monomial::variable(0, 3)), 3.0);
  EXPECT_DOUBLE_EQ(ab.coefficient(mono({{0, 1}, {1, 1}})), 6.0);
  CounterRng rng(7);
  for (int t = 0; t < 10; ++t) {
    auto x = test::random_point(2, rng);
    double direct = (x[0] * x[0] + 2 * x[1]) * (3 * x[0]);
    EXPECT_NEAR(ab.evaluate(x), direct, 1e-12 * (1 + std::abs(direct)));
  }
}

TEST(Polynomial, ArithKinds) {
  Polynomial a = var(2, 0), b = var(2, 1);
  EXPECT_EQ(arith(a, b, ArithKind::add), a + b);
  EXPECT_EQ(arith(a, b, ArithKind::sub), a - b);
  EXPECT_EQ(arith(a, b, ArithKind::scale, 2.5), 2.5 * a);
}

TEST(Polynomial, MismatchedNumVarsIsDimensionError) {
  EXPECT_THROW(var(2, 0) + var(3, 0), DimensionError);
  EXPECT_THROW(arith(var(2, 0), var(3, 0), ArithKind::mul), DimensionError);
}

TEST(Polynomial, EvaluationExamples) {
  std::vector<double> any{0.3, -2.0};
  EXPECT_EQ(cst(2, 1.0).evaluate(any), 1.0);
  Polynomial h = var(1, 0) * var(1, 0) - var(1, 0);
  EXPECT_EQ(h.evaluate(std::vector<double>{1.0}), 0.0);
  EXPECT_EQ(h.evaluate(std::vector<double>{0.0}), 0.0);
  EXPECT_EQ(test::local_minima_poly(2).evaluate(std::vector<double>{0.0, 0.0}), 0.0);
}

TEST(Polynomial, EvaluationLengthMismatchIsDimensionError) {
  EXPECT_THROW(var(2, 0).evaluate(std::vector<double>{1.0}), DimensionError);
}

TEST(Polynomial, ZeroPolynomialHasDegreeZero) {
  EXPECT_EQ(Polynomial(3).degree(), 0);
  EXPECT_TRUE(Polynomial(3).is_zero());
}

TEST(Polynomial, TermsStayInsideNumVars) {
  Polynomial p(2);
  EXPECT_THROW(p.add_term(Monomial::variable(2), 1.0), DimensionError);
}

TEST(HypercubeReduction, SquareReducesToOne) {
  auto r = reduce_hypercube(var(1, 0) * var(1, 0));
  EXPECT_EQ(r.multilinear, cst(1, 1.0));
  ASSERT_EQ(r.quotients.size(), 1u);
  EXPECT_EQ(r.quotients[0], cst(1, 1.0));
}

TEST(HypercubeReduction, CubeTimesVariable) {
  Polynomial p = var(2, 0).pow(3) * var(2, 1);
  auto r = reduce_hypercube(p);
  Polynomial x1x2 = var(2, 0) * var(2, 1);
  EXPECT_EQ(r.multilinear, x1x2);
  EXPECT_EQ(r.quotients[0], x1x2);
  EXPECT_TRUE(r.quotients[1].is_zero());
  // x1^3 x2 = x1 x2 + x1 x2 (x1^2 - 1), expanded by hand.
  Polynomial rebuilt = x1x2 + x1x2 * (var(2, 0) * var(2, 0) - cst(2, 1.0));
  EXPECT_EQ(rebuilt, p);
}

TEST(HypercubeReduction, MultilinearIsFixedPoint) {
  Polynomial p = 2.0 * var(3, 0) * var(3, 2) - var(3, 1) + cst(3, 0.5);
  auto r = reduce_hypercube(p);
  EXPECT_EQ(r.multilinear, p);
  for (const auto& q : r.quotients) EXPECT_TRUE(q.is_zero());
}

TEST(HypercubeReduction, IdentityHoldsOnRandomPolynomials) {
  CounterRng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 4;
    Polynomial p = test::random_poly(n, 6, 8, rng);
    auto r = reduce_hypercube(p);
    Polynomial rebuilt = r.multilinear;
    for (std::uint32_t i = 0; i < n; ++i) {
      rebuilt += r.quotients[i] * (var(n, i) * var(n, i) - cst(n, 1.0));
      EXPECT_LE(r.quotients[i].degree(), std::max(0, p.degree() - 2));
    }
    EXPECT_LE(max_coefficient_difference(rebuilt, p), 1e-10);
    for (const auto& [m, c] : r.multilinear.terms()) {
      for (const auto& f : m.factors()) EXPECT_EQ(f.second, 1u);
    }
  }
}

TEST(Interpolation, ConstantTable) {
  std::vector<double> table(8, 2.5);
  EXPECT_EQ(interpolate_multilinear(3, table), cst(3, 2.5));
}

TEST(Interpolation, IdentityInOneVariable) {
  std::map<std::vector<int>, double> values{{{1}, 1.0}, {{-1}, -1.0}};
  EXPECT_EQ(interpolate_multilinear(1, values), var(1, 0));
}

TEST(Interpolation, ProductOfCoordinates) {
  std::map<std::vector<int>, double> values;
  for (int a : {-1, 1}) {
    for (int b : {-1, 1}) values[{a, b}] = a * b;
  }
  Polynomial p = interpolate_multilinear(2, values);
  EXPECT_LE(max_coefficient_difference(p, var(2, 0) * var(2, 1)), 1e-15);
  for (const auto& [pt, v] : values) {
    EXPECT_EQ(p.evaluate(std::vector<double>{double(pt[0]), double(pt[1])}), v);
  }
}

TEST(Interpolation, MissingPointsAreReported) {
  std::map<std::vector<int>, double> values{{{1, 1}, 1.0}};
  EXPECT_THROW(interpolate_multilinear(2, values), IncompleteTableError);
  EXPECT_THROW(interpolate_multilinear(2, std::vector<double>(3, 0.0)), IncompleteTableError);
}

TEST(Interpolation, RoundTripOnMultilinearPolynomials) {
  CounterRng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 4;
    Polynomial p = reduce_hypercube(test::random_poly(n, 4, 6, rng)).multilinear;
    std::vector<double> table(std::size_t{1} << n);
    for (std::uint64_t k = 0; k < table.size(); ++k) table[k] = p.evaluate(hypercube_point(n, k));
    EXPECT_LE(max_coefficient_difference(interpolate_multilinear(n, table), p), 1e-12);
  }
}

TEST(RandomLinearForm, OneVariableIsPlusOrMinusX) {
  Polynomial l = random_linear_form(1, 3);
  ASSERT_EQ(l.terms().size(), 1u);
  EXPECT_NEAR(std::abs(l.coefficient(Monomial::variable(0))), 1.0, 1e-12);
}

TEST(RandomLinearForm, UnitNormHomogeneousAndReproducible) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Polynomial l = random_linear_form(5, seed);
    double norm2 = 0.0;
    for (const auto& [m, c] : l.terms()) {
      EXPECT_EQ(m.degree(), 1);
      norm2 += c * c;
    }
    EXPECT_NEAR(std::sqrt(norm2), 1.0, 1e-12);
  }
  EXPECT_EQ(random_linear_form(3, 42), random_linear_form(3, 42));
  EXPECT_NE(random_linear_form(3, 42), random_linear_form(3, 43));
}

TEST(Polynomial, ProductAgreesWithEvaluation) {
  CounterRng rng(23);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + rng() % 4;
    Polynomial a = test::random_poly(n, 3, 5, rng), b = test::random_poly(n, 3, 5, rng);
    auto x = test::random_point(n, rng);
    double expect = a.evaluate(x) * b.evaluate(x);
    EXPECT_NEAR((a * b).evaluate(x), expect, 1e-9 * std::max(1.0, std::abs(expect)));
  }
}

}  // namespace
}  // namespace sos
