#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "sos/errors.hpp"
#include "sos/expansion.hpp"
#include "suites.hpp"

namespace sos {
namespace {

Graph two_triangles() { return Graph::disjoint_union(Graph::complete(3), Graph::complete(3)); }

TEST(Graph, RejectsMalformedEdgeLists) {
  EXPECT_THROW(Graph(3, 2, {{0, 1}, {1, 2}}), InvalidArgument);
  EXPECT_THROW(Graph(2, 1, {{0, 0}}), InvalidArgument);
  EXPECT_THROW(Graph(2, 2, {{0, 1}, {1, 0}}), InvalidArgument);
  EXPECT_THROW(Graph(2, 1, {{0, 2}}), InvalidArgument);
}

TEST(Graph, ParseRoundTripAndLineNumbers) {
  Graph c4 = Graph::cycle(4);
  Graph back = Graph::parse_string(c4.to_string());
  EXPECT_EQ(back.num_vertices(), 4);
  EXPECT_EQ(back.edges(), c4.edges());
  try {
    Graph::parse_string("3 2\n0 1\n1 x\n");
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Graph, LaplacianDefinition) {
  Graph k4 = Graph::complete(4);
  Eigen::MatrixXd expect = Eigen::MatrixXd::Identity(4, 4) - k4.adjacency() / 3.0;
  EXPECT_LE((k4.laplacian() - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Graph, RandomRegularIsRegularAndSeeded) {
  for (const Graph& g : test::cubic_corpus()) {
    Eigen::VectorXd deg = g.adjacency().rowwise().sum();
    EXPECT_EQ(deg.minCoeff(), 3.0);
    EXPECT_EQ(deg.maxCoeff(), 3.0);
  }
  EXPECT_EQ(Graph::random_regular(10, 3, 7).edges(), Graph::random_regular(10, 3, 7).edges());
}

TEST(PhiOfSet, HandCounts) {
  EXPECT_DOUBLE_EQ(phi_of_set(Graph::cycle(4), {0, 1}), 0.5);
  EXPECT_DOUBLE_EQ(phi_of_set(Graph::complete(4), {1, 3}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(phi_of_set(two_triangles(), {0, 1, 2}), 0.0);
  EXPECT_THROW(phi_of_set(Graph::cycle(4), {}), InvalidArgument);
  EXPECT_THROW(phi_of_set(Graph::cycle(4), {4}), InvalidArgument);
}

TEST(BruteForce, SmallGraphs) {
  EXPECT_DOUBLE_EQ(brute_force_phi(Graph::cycle(4)).phi, 0.5);
  EXPECT_DOUBLE_EQ(brute_force_phi(Graph::complete(4)).phi, 2.0 / 3.0);
  BruteForceResult tt = brute_force_phi(two_triangles());
  EXPECT_DOUBLE_EQ(tt.phi, 0.0);
  EXPECT_DOUBLE_EQ(phi_of_set(two_triangles(), tt.argmin), 0.0);
  EXPECT_THROW(brute_force_phi(Graph::random_regular(18, 3, 1)), InvalidArgument);
}

TEST(SpectralBounds, KnownSpectra) {
  SpectralBounds tt = spectral_bounds(two_triangles());
  EXPECT_NEAR(tt.lambda2, 2.0, 1e-12);
  EXPECT_NEAR(tt.lower, 0.0, 1e-12);
  EXPECT_NEAR(tt.upper, 0.0, 1e-6);
  SpectralBounds k4 = spectral_bounds(Graph::complete(4));
  EXPECT_NEAR(k4.lambda2, -1.0, 1e-12);
  EXPECT_NEAR(k4.lower, 2.0 / 3.0, 1e-12);
  SpectralBounds c4 = spectral_bounds(Graph::cycle(4));
  EXPECT_NEAR(c4.lambda2, 0.0, 1e-12);
  EXPECT_NEAR(c4.lower, 0.5, 1e-12);
  EXPECT_NEAR(c4.upper, std::sqrt(2.0), 1e-12);
}

TEST(SpectralBounds, CheegerSandwich) {
  for (const Graph& g : test::cubic_corpus()) {
    SpectralBounds b = spectral_bounds(g);
    double phi = brute_force_phi(g).phi;
    EXPECT_LE(b.lower - 1e-9, phi);
    EXPECT_LE(phi, b.upper + 1e-9);
  }
}

TEST(Sos2Estimate, RelaxedModeAnalyticValues) {
  EXPECT_NEAR(sos2_estimate(Graph::complete(4), ExpansionMode::relaxed).estimate, 2.0 / 3.0, 1e-4);
  EXPECT_NEAR(sos2_estimate(Graph::cycle(4), ExpansionMode::relaxed).estimate, 0.5, 1e-4);
  EXPECT_LE(sos2_estimate(two_triangles(), ExpansionMode::relaxed).estimate, 1e-5);
}

TEST(Sos2Estimate, SizeOutOfRange) {
  EXPECT_THROW(sos2_estimate(Graph::complete(4), ExpansionMode::exact, 3), InvalidArgument);
  EXPECT_THROW(sos2_estimate(Graph::complete(4), ExpansionMode::exact, 0), InvalidArgument);
}

TEST(Sos2Estimate, ExactModeIsSound) {
  for (const Graph& g : test::cubic_corpus()) {
    if (g.num_vertices() > 8) continue;
    for (int k = 1; k <= g.num_vertices() / 2; ++k) {
      double truth = brute_force_phi(g, k).phi;
      EXPECT_LE(sos2_estimate(g, ExpansionMode::exact, k).estimate, truth + 1e-5) << "k = " << k;
    }
  }
}

TEST(RoundExpansion, PointMassOnTriangle) {
  std::vector<double> ind{1, 1, 1, 0, 0, 0};
  RoundingResult r = round_expansion(two_triangles(), PseudoExpectation::point_mass(ind, 2));
  std::vector<int> set = r.set;
  std::sort(set.begin(), set.end());
  EXPECT_EQ(set, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(r.phi, 0.0);
}

TEST(RoundExpansion, AllDrawsEmpty) {
  std::vector<double> zero(6, 0.0);
  EXPECT_THROW(round_expansion(two_triangles(), PseudoExpectation::point_mass(zero, 2)), RoundingError);
}

TEST(RoundExpansion, RoundedSetsAreLegal) {
  Graph k4 = Graph::complete(4);
  RoundingResult r = round_expansion(k4, sos2_estimate(k4, ExpansionMode::exact, 2).witness);
  EXPECT_LE(r.phi, 1.0);
  for (const Graph& g : test::cubic_corpus()) {
    if (g.num_vertices() > 8) continue;
    const int n = g.num_vertices();
    RoundingResult rr = round_expansion(g, sos2_estimate(g, ExpansionMode::exact, n / 2).witness);
    EXPECT_GE(rr.set.size(), 1u);
    EXPECT_LE(static_cast<int>(rr.set.size()), n / 2);
    EXPECT_DOUBLE_EQ(rr.phi, phi_of_set(g, rr.set));
  }
}

TEST(AnalyzeExpansion, ReportIsConsistent) {
  ExpansionReport r = analyze_expansion(Graph::complete(4), ExpansionMode::relaxed, std::nullopt);
  ASSERT_TRUE(r.phi_true.has_value());
  EXPECT_DOUBLE_EQ(*r.phi_true, 2.0 / 3.0);
  EXPECT_NEAR(r.phi_sos2, 2.0 / 3.0, 1e-4);
  EXPECT_LE(r.spectral.lower, *r.phi_true + 1e-9);
  EXPECT_GE(r.phi_of_rounded, *r.phi_true - 1e-12);
}

}  // namespace
}  // namespace sos
