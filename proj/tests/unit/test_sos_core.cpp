#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "sos/certificate.hpp"
#include "sos/errors.hpp"
#include "sos/moment.hpp"
#include "suites.hpp"
#include "test_support.hpp"

namespace sos {
namespace {

using test::cst;
using test::var;

PolynomialSystem single(std::size_t n, Polynomial eq) {
  PolynomialSystem s(n);
  s.equalities.push_back(std::move(eq));
  return s;
}

double cube_minimum(const Polynomial& p) {
  const std::size_t n = p.num_vars();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) best = std::min(best, p.evaluate(hypercube_point(n, k)));
  return best;
}

TEST(Relaxation, IdempotentConstraintAtDegreeTwo) {
  Polynomial x = var(1, 0);
  MomentRelaxation r = build_relaxation(single(1, x * x - x), 2);
  EXPECT_EQ(r.basis.size(), 2u);
  EXPECT_EQ(r.sat_rows.size(), 1u);
}

TEST(Relaxation, UnconstrainedHasOnlyNormalization) {
  for (bool sym : {false, true}) {
    MomentRelaxation r = build_relaxation(PolynomialSystem(1), 2, RelaxationOptions{sym});
    EXPECT_EQ(r.sdp.constraints.size(), 1u);
  }
}

TEST(Relaxation, MomentMatrixDimensionIsBinomial) {
  MomentRelaxation r = build_relaxation(PolynomialSystem(2), 4);
  EXPECT_EQ(r.sdp.matrix_dim, 6);  // C(4, 2)
}

TEST(Relaxation, DegreeErrors) {
  Polynomial x = var(1, 0);
  EXPECT_THROW(build_relaxation(single(1, x * x * x), 2), DegreeError);
  EXPECT_THROW(build_relaxation(PolynomialSystem(1), 3), DegreeError);
  EXPECT_THROW(build_relaxation(PolynomialSystem(1), kMaxRelaxationDegree + 2), DegreeError);
}

TEST(Estimate, MinimizeCoordinateOverSquareRoots) {
  Polynomial x = var(1, 0);
  PolynomialSystem s = single(1, x * x - cst(1, 1.0));
  s.objective = x;
  EXPECT_NEAR(sos_estimate(s, 2).estimate, -1.0, 1e-4);
}

TEST(Estimate, UnconstrainedSquare) {
  PolynomialSystem s(1);
  Polynomial d = var(1, 0) - cst(1, 1.0);
  s.objective = d * d;
  EstimateReport r = sos_estimate(s, 2);
  EXPECT_NEAR(r.estimate, 0.0, 1e-4);
  EXPECT_TRUE(r.ball_added);
}

TEST(Estimate, LocalMinimaPolynomialDegreeFour) {
  for (std::size_t n : {2u, 3u}) {
    PolynomialSystem s(n);
    s.objective = test::local_minima_poly(n);
    EXPECT_NEAR(sos_estimate(s, 4).estimate, 0.0, 1e-3) << "n = " << n;
  }
}

TEST(Estimate, WitnessSatisfiesTheSystem) {
  PolynomialSystem s = test::feasible_bounded_system(3, 4);
  CounterRng rng(4);
  s.objective = test::random_poly(3, 2, 5, rng);
  EstimateReport r = sos_estimate(s, 2);
  EXPECT_TRUE(satisfies(r.witness, s).passed);
  EXPECT_NO_THROW(r.witness.check_invariants());
}

TEST(Estimate, RefutableSystemSignalsRefutation) {
  Polynomial x = var(1, 0);
  EXPECT_THROW(sos_estimate(single(1, x * x + cst(1, 1.0)), 2), RefutableError);
}

TEST(Estimate, MonotoneInDegree) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    PolynomialSystem s = test::paired_sphere_system(2, seed);
    CounterRng rng(seed + 100);
    s.objective = test::random_poly(4, 2, 8, rng);
    double e2 = sos_estimate(s, 2).estimate;
    double e4 = sos_estimate(s, 4).estimate;
    EXPECT_LE(e2, e4 + 1e-5) << "seed " << seed;
  }
}

TEST(Estimate, SoundOnHypercubeSystems) {
  CounterRng rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 2 + trial % 3;
    PolynomialSystem s = test::cube_constraints(n);
    s.objective = test::random_poly(n, 2, 6, rng);
    const double truth = cube_minimum(s.objective);
    for (int degree : {2, 4}) {
      EXPECT_LE(sos_estimate(s, degree).estimate, truth + 1e-5) << "trial " << trial;
    }
  }
}

TEST(Certificate, SquarePlusOne) {
  Polynomial x = var(1, 0);
  PolynomialSystem s = single(1, x * x + cst(1, 1.0));
  SosCertificate c = extract_certificate(s, 2);
  IdentityReport r = verify_certificate(s, c);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.identity_residual, 1e-8);
  EXPECT_LE(max_coefficient_difference(c.gram_polynomial(), x * x), 1e-6);
  ASSERT_EQ(c.multipliers.size(), 1u);
  EXPECT_LE(max_coefficient_difference(c.multipliers[0], cst(1, -1.0)), 1e-6);
}

TEST(Certificate, InconsistentRootAndLinear) {
  Polynomial x = var(1, 0);
  PolynomialSystem s(1);
  s.equalities = {x * x - cst(1, 1.0), x - cst(1, 2.0)};
  SosCertificate c = extract_certificate(s, 2);
  IdentityReport r = verify_certificate(s, c);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.identity_residual, 1e-8);
}

TEST(Certificate, SatisfiableSystemHasNone) {
  Polynomial x = var(1, 0);
  EXPECT_THROW(extract_certificate(single(1, x * x - x), 2), NoCertificateError);
}

TEST(Certificate, HandWrittenIdentityVerifies) {
  Polynomial x = var(1, 0);
  PolynomialSystem s = single(1, x * x + cst(1, 1.0));
  SosCertificate c;
  c.num_vars = 1;
  c.degree = 2;
  c.basis = {Monomial::variable(0)};
  c.gram = Eigen::MatrixXd::Ones(1, 1);
  c.multipliers = {cst(1, -1.0)};
  IdentityReport r = verify_certificate(s, c);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.identity_residual, 0.0);

  c.multipliers[0] += 1e-3 * x;
  r = verify_certificate(s, c);
  EXPECT_FALSE(r.passed);
  EXPECT_NEAR(r.identity_residual, 1e-3, 1e-12);
}

TEST(Certificate, IndefiniteGramFails) {
  Polynomial x = var(1, 0);
  PolynomialSystem s = single(1, x * x + cst(1, 1.0));
  SosCertificate c;
  c.num_vars = 1;
  c.degree = 2;
  c.basis = {Monomial(), Monomial::variable(0)};
  c.gram = Eigen::Vector2d(-1e-2, 1.0).asDiagonal();
  c.multipliers = {cst(1, -1.0)};
  IdentityReport r = verify_certificate(s, c);
  EXPECT_FALSE(r.passed);
  EXPECT_NEAR(r.lambda_min, -1e-2, 1e-12);
}

TEST(HypercubeRefutation, OneVariableClosedForm) {
  Polynomial p0 = var(1, 0) - cst(1, 3.0);
  SosCertificate c = hypercube_refutation(p0);
  // R = a + b x with R(1) = sqrt(3), R(-1) = sqrt(15).
  const double a = (std::sqrt(3.0) + std::sqrt(15.0)) / 2, b = (std::sqrt(3.0) - std::sqrt(15.0)) / 2;
  Polynomial r = cst(1, a) + b * var(1, 0);
  EXPECT_LE(max_coefficient_difference(c.gram_polynomial(), r * r), 1e-12);
  EXPECT_TRUE(verify_certificate(hypercube_system(p0), c).passed);
}

TEST(HypercubeRefutation, TwoVariables) {
  Polynomial p0 = var(2, 0) + var(2, 1) - cst(2, 5.0);
  SosCertificate c = hypercube_refutation(p0);
  EXPECT_LE(c.degree, 4);
  EXPECT_TRUE(verify_certificate(hypercube_system(p0), c).passed);
}

TEST(HypercubeRefutation, RootIsReported) {
  try {
    hypercube_refutation(var(1, 0) - cst(1, 1.0));
    FAIL() << "expected SatisfiableError";
  } catch (const SatisfiableError& e) {
    EXPECT_EQ(e.witness(), std::vector<int>{1});
  }
}

TEST(HypercubeRefutation, RandomRootlessPolynomials) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 1 + seed % 4;
    Polynomial p0 = test::rootless_cube_poly(n, seed);
    SosCertificate c = hypercube_refutation(p0);
    IdentityReport r = verify_certificate(hypercube_system(p0), c);
    EXPECT_TRUE(r.passed) << "seed " << seed;
    EXPECT_LE(c.degree, static_cast<int>(2 * n));
  }
}

TEST(Satisfies, PointMasses) {
  Polynomial x = var(1, 0);
  PolynomialSystem s = single(1, x * x - x);
  auto one = PseudoExpectation::point_mass(std::vector<double>{1.0}, 2);
  SatisfactionReport r = satisfies(one, s);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.max_residual, 0.0);
  auto two = PseudoExpectation::point_mass(std::vector<double>{2.0}, 2);
  r = satisfies(two, s);
  EXPECT_FALSE(r.passed);
  EXPECT_DOUBLE_EQ(r.max_residual, 2.0);
}

TEST(Reweight, PointMassIsFixed) {
  std::vector<double> v{0.5, -1.5};
  auto pe = PseudoExpectation::point_mass(v, 4);
  Polynomial w = var(2, 0) + 2.0 * var(2, 1) + cst(2, 4.0);
  auto out = reweight(pe, w);
  EXPECT_EQ(out.degree(), 2);
  auto expect = PseudoExpectation::point_mass(v, 2);
  for (const auto& [m, val] : expect.moments()) EXPECT_NEAR(out.moment(m), val, 1e-12);
}

TEST(Reweight, WeightVanishingOnOnePointSelectsTheOther) {
  std::vector<std::vector<double>> pts{{1.0, 2.0}, {-1.0, 0.5}};
  std::vector<double> weights{0.5, 0.5};
  auto pe = PseudoExpectation::mixture(pts, weights, 4);
  // W(x) = x_0 + 1 vanishes at the second point.
  auto out = reweight(pe, var(2, 0) + cst(2, 1.0));
  auto expect = PseudoExpectation::point_mass(pts[0], 2);
  for (const auto& [m, val] : expect.moments()) EXPECT_NEAR(out.moment(m), val, 1e-12);
}

TEST(Reweight, ConstantWeightIsIdentity) {
  auto pe = PseudoExpectation::mixture({{1.0, 0.0}, {0.3, -2.0}}, std::vector<double>{0.25, 0.75}, 4);
  auto out = reweight(pe, cst(2, 3.0));
  EXPECT_EQ(out.degree(), 4);
  for (const auto& m : monomials_up_to(2, 4)) EXPECT_NEAR(out.moment(m), pe.moment(m), 1e-12);
}

TEST(Reweight, DegenerateWeight) {
  auto pe = PseudoExpectation::point_mass(std::vector<double>{1.0}, 4);
  EXPECT_THROW(reweight(pe, var(1, 0) - cst(1, 1.0)), DegenerateWeightError);
}

TEST(Reweight, SolverOutputStaysValid) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PolynomialSystem s = test::paired_sphere_system(2, seed);
    EstimateReport r = sos_estimate(s, 4);
    auto out = reweight(r.witness, random_linear_form(4, seed));
    EXPECT_NO_THROW(out.check_invariants(1e-7, 1e-9));
    EXPECT_NEAR(out.moment(Monomial()), 1.0, 1e-9);
  }
}

TEST(Duality, ExactlyOneAlternative) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const std::size_t n = 2 + seed % 2;
    for (bool feasible : {true, false}) {
      PolynomialSystem s = feasible ? test::feasible_bounded_system(n, seed)
                                    : test::refutable_bounded_system(n, seed);
      DualityOutcome d = resolve_duality(s, 2);
      EXPECT_NE(d.certificate.has_value(), d.pseudoexpectation.has_value());
      EXPECT_EQ(d.pseudoexpectation.has_value(), feasible) << "seed " << seed;
      if (d.certificate) EXPECT_TRUE(d.certificate_report.passed);
      if (d.pseudoexpectation) EXPECT_TRUE(d.satisfaction_report.passed);
    }
  }
}

TEST(PseudoNorms, HolderAndTriangleOnSolverOutput) {
  const std::size_t k = 2;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EstimateReport r = sos_estimate(test::paired_sphere_system(k, seed), 4);
    const auto& pe = r.witness;
    const std::size_t n = 2 * k;
    Polynomial u4(n), v4(n), u3v(n), sum4(n);
    for (std::uint32_t i = 0; i < k; ++i) {
      Polynomial u = var(n, i), v = var(n, static_cast<std::uint32_t>(k + i));
      u4 += u.pow(4);
      v4 += v.pow(4);
      u3v += u.pow(3) * v;
      sum4 += (u + v).pow(4);
    }
    const double eu = pe.apply(u4) / k, ev = pe.apply(v4) / k;
    EXPECT_LE(pe.apply(u3v) / k, std::pow(eu, 0.75) * std::pow(ev, 0.25) + 1e-6);
    EXPECT_LE(std::pow(pe.apply(sum4), 0.25), std::pow(pe.apply(u4), 0.25) + std::pow(pe.apply(v4), 0.25) + 1e-6);
  }
}

}  // namespace
}  // namespace sos
