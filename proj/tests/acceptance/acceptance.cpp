// Acceptance run: one line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "sos/certificate.hpp"
#include "sos/dict_learn.hpp"
#include "sos/errors.hpp"
#include "sos/expansion.hpp"
#include "sos/hyper.hpp"
#include "sos/moment.hpp"
#include "sos/rounding.hpp"
#include "sos/sparse_vec.hpp"
#include "suites.hpp"
#include "test_support.hpp"

namespace sos {
namespace {

using test::cst;
using test::var;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds
  std::function<Verdict()> body;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Subspace gaussian_subspace(int n, int d, std::uint64_t seed) {
  CounterRng rng(seed);
  auto v = gaussian_vector(rng, static_cast<std::size_t>(n * d));
  return Subspace::span(Eigen::Map<Eigen::MatrixXd>(v.data(), n, d));
}

// Degree-2 pseudoexpectations for the exact k = n/2 expansion systems of the
// cubic corpus, shared by the rounding criteria.
const std::vector<EstimateReport>& corpus_estimates() {
  static const std::vector<EstimateReport> out = [] {
    std::vector<EstimateReport> v;
    for (const Graph& g : test::cubic_corpus()) {
      v.push_back(sos2_estimate(g, ExpansionMode::exact, g.num_vertices() / 2));
    }
    return v;
  }();
  return out;
}

Verdict small_graphs() {
  Graph k4 = Graph::complete(4), c4 = Graph::cycle(4);
  Graph tt = Graph::disjoint_union(Graph::complete(3), Graph::complete(3));
  const double bk4 = brute_force_phi(k4).phi, bc4 = brute_force_phi(c4).phi, btt = brute_force_phi(tt).phi;
  const double sk4 = sos2_estimate(k4, ExpansionMode::relaxed).estimate;
  const double sc4 = sos2_estimate(c4, ExpansionMode::relaxed).estimate;
  const double stt = sos2_estimate(tt, ExpansionMode::relaxed).estimate;
  const bool pass = bk4 == 2.0 / 3.0 && bc4 == 0.5 && btt == 0.0 && std::abs(sk4 - 2.0 / 3.0) <= 1e-4 &&
                    std::abs(sc4 - 0.5) <= 1e-4 && stt <= 1e-5;
  return {pass, fmt("brute force %.6f %.6f %.6f; relaxed SOS %.6f %.6f %.2e", bk4, bc4, btt, sk4, sc4, stt)};
}

Verdict cheeger_sandwich() {
  int ok = 0, total = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const Graph& g : test::cubic_corpus()) {
    SpectralBounds b = spectral_bounds(g);
    const double phi = brute_force_phi(g).phi;
    const double slack = std::min(phi - b.lower, b.upper - phi);
    worst = std::min(worst, slack);
    ok += slack >= -1e-9;
    ++total;
  }
  return {ok == total, fmt("%d/%d graphs inside the bounds, smallest slack %.3e", ok, total, worst)};
}

Verdict rounding_quality() {
  const auto corpus = test::cubic_corpus();
  const auto& est = corpus_estimates();
  int ok = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    RoundingOptions ro;
    ro.seed = i;
    RoundingResult r = round_expansion(corpus[i], est[i].witness, ro);
    ok += r.phi <= 4 * std::sqrt(std::max(0.0, est[i].estimate)) + 0.1;
  }
  const double frac = static_cast<double>(ok) / static_cast<double>(corpus.size());
  return {frac >= 0.9, fmt("%d/%zu instances within 4 sqrt(phi2) + 0.1", ok, corpus.size())};
}

Verdict local_minima() {
  std::string detail;
  bool pass = true;
  for (std::size_t n : {2u, 3u}) {
    PolynomialSystem s(n);
    s.objective = test::local_minima_poly(n);
    const double e = sos_estimate(s, 4).estimate;
    pass = pass && std::abs(e) <= 1e-3;
    detail += fmt("n=%zu estimate %.3e; ", n, e);
  }
  return {pass, detail};
}

Verdict hypercube_refutations() {
  int ok = 0;
  double worst_res = 0.0, worst_lambda = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Polynomial p0 = test::rootless_cube_poly(1 + seed % 3, seed);
    SosCertificate c = hypercube_refutation(p0);
    IdentityReport r = verify_certificate(hypercube_system(p0), c);
    worst_res = std::max(worst_res, r.identity_residual);
    worst_lambda = std::min(worst_lambda, r.lambda_min);
    ok += r.identity_residual <= 1e-8 && r.lambda_min >= -1e-7;
  }
  return {ok == 30, fmt("%d/30 certificates; max residual %.2e, min eigenvalue %.2e", ok, worst_res, worst_lambda)};
}

Verdict duality() {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t n = 2 + seed % 2;
    for (bool feasible : {true, false}) {
      PolynomialSystem s = feasible ? test::feasible_bounded_system(n, seed) : test::refutable_bounded_system(n, seed);
      try {
        DualityOutcome d = resolve_duality(s, 2);
        const bool cert = d.certificate && d.certificate_report.passed;
        const bool pe = d.pseudoexpectation && d.satisfaction_report.passed;
        ok += cert != pe && pe == feasible;
      } catch (const Error&) {
      }
    }
  }
  return {ok == 20, fmt("%d/20 systems resolved to exactly one verified alternative", ok)};
}

Verdict pseudo_norms() {
  double worst = std::numeric_limits<double>::infinity();
  int count = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t k = 2 + seed % 2, n = 2 * k;
    const PseudoExpectation pe = sos_estimate(test::paired_sphere_system(k, seed), 4).witness;
    auto mean_power = [&](int a, int b) {
      Polynomial s(n);
      for (std::uint32_t i = 0; i < k; ++i) {
        s += var(n, i).pow(a) * var(n, static_cast<std::uint32_t>(k + i)).pow(b);
      }
      return pe.apply(s) / static_cast<double>(k);
    };
    for (auto [a, b] : {std::pair{1, 1}, {2, 2}, {3, 1}, {1, 3}}) {
      const double q = a + b;
      const double rhs = std::pow(mean_power(a + b, 0), a / q) * std::pow(mean_power(0, a + b), b / q);
      worst = std::min(worst, rhs - mean_power(a, b));
    }
    Polynomial u4(n), v4(n), s4(n);
    for (std::uint32_t i = 0; i < k; ++i) {
      Polynomial u = var(n, i), v = var(n, static_cast<std::uint32_t>(k + i));
      u4 += u.pow(4);
      v4 += v.pow(4);
      s4 += (u + v).pow(4);
    }
    worst = std::min(worst, std::pow(pe.apply(u4), 0.25) + std::pow(pe.apply(v4), 0.25) - std::pow(pe.apply(s4), 0.25));
    ++count;
  }
  return {worst >= -1e-6, fmt("%d pseudoexpectations, smallest slack %.3e", count, worst)};
}

// Per entry: |empirical - target| <= 3 standard errors of the empirical mean.
Verdict moment_matching() {
  std::vector<PseudoExpectation> suite;
  for (const auto& e : corpus_estimates()) suite.push_back(e.witness);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    suite.push_back(resolve_duality(test::feasible_bounded_system(2 + seed % 2, seed), 2).pseudoexpectation.value());
  }
  const std::size_t count = 100000;
  double worst_symbolic = 0.0, worst_z = 0.0;
  int checks = 0, misses = 0;
  for (std::size_t s = 0; s < suite.size(); ++s) {
    const PseudoExpectation& pe = suite[s];
    GaussianSampler g = match_two_moments(pe);
    const Eigen::MatrixXd target = pe.second_moments();
    worst_symbolic = std::max(worst_symbolic, (g.second_moments() - target).cwiseAbs().maxCoeff());
    const auto draws = sample(g, count, s);
    const Eigen::Index n = target.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        double sum = 0.0, sq = 0.0;
        for (const auto& y : draws) {
          const double v = y(i) * y(j);
          sum += v;
          sq += v * v;
        }
        const double mean = sum / count;
        const double var = std::max(0.0, (sq / count - mean * mean) * count / (count - 1));
        const double se = std::sqrt(var / count);
        const double dev = std::abs(mean - target(i, j));
        // Deterministic entries have se = 0; allow for summation roundoff.
        const bool ok = dev <= 3 * se + 1e-12 * std::max(1.0, std::abs(target(i, j)));
        if (se > 0) worst_z = std::max(worst_z, dev / se);
        ++checks;
        misses += !ok;
      }
    }
  }
  // Two-sided Gaussian tail beyond 3: the miss count expected from exact
  // matching alone.
  const double expected = checks * std::erfc(3.0 / std::sqrt(2.0));
  return {worst_symbolic <= 1e-9 && misses == 0,
          fmt("%zu pseudoexpectations; symbolic max error %.2e; %d/%d entries outside 3 SE "
              "(max z %.2f; %.1f expected by chance under exact matching)",
              suite.size(), worst_symbolic, misses, checks, worst_z, expected)};
}

Verdict sparse_recovery() {
  int ok = 0;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SparseInstance inst = generate_instance(20, 2, 2, seed);
    RecoveryOptions opts;
    opts.seed = seed;
    try {
      RecoveryReport r = recover(inst, opts);
      ok += r.correlation >= 0.8;
      detail += fmt("%.3f ", r.correlation);
    } catch (const Error& e) {
      detail += std::string(e.kind()) + " ";
    }
  }
  return {ok >= 8, fmt("%d/10 seeds with correlation >= 0.8 (", ok) + detail + ")"};
}

Verdict four_norm_certification() {
  int ok = 0;
  double min_mu = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Subspace sub = gaussian_subspace(300, 3, 500 + seed);
    try {
      FourNormCertificate c = certify_subspace_4norm(sub);
      min_mu = std::min(min_mu, c.mu_prime);
      ok += c.evidence.report.passed && c.mu_prime >= 300.0 / 10;
    } catch (const Error&) {
    }
  }
  double baseline = 0.0;
  for (int d = 1; d <= 6; ++d) {
    baseline = std::max(baseline, max_coefficient_difference(gaussian_quartic_expectation(d), 3.0 * norm_quartic(d)));
  }
  return {ok >= 8 && baseline <= 1e-9,
          fmt("%d/10 verified with mu' >= 30 (smallest %.1f); Gaussian baseline error %.1e", ok, min_mu, baseline)};
}

Verdict dictionary_learning() {
  int ok = 0;
  std::string detail;
  const NiceDistSpec spec{4, 0.2};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Dictionary a = Dictionary::random_orthogonal(8, seed);
    Eigen::MatrixXd y = sample_observations(a, spec, 10000, 1000 + seed);
    try {
      LearnReport r = learn_dictionary(y, spec, 1.0, seed, {}, &a);
      const bool good = r.hausdorff && *r.hausdorff <= 0.25;
      ok += good;
      detail += r.hausdorff ? fmt("%.3f ", *r.hausdorff) : std::string("none ");
    } catch (const Error& e) {
      detail += std::string(e.kind()) + " ";
    }
  }
  return {ok >= 7, fmt("%d/10 seeds with Hausdorff <= 0.25 (", ok) + detail + ")"};
}

Verdict dimension_witness() {
  CounterRng rng(2024);
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 99);
    const int d = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::min(10, n)));
    const int p = 2 + trial % 2;
    DimWitness w = dim_bound_witness(gaussian_subspace(n, d, 900 + static_cast<std::uint64_t>(trial)), p);
    double m2 = 0.0, m2p = 0.0;
    for (Eigen::Index i = 0; i < w.x.size(); ++i) {
      m2 += w.x(i) * w.x(i) / n;
      m2p += std::pow(w.x(i), 2 * p) / n;
    }
    worst = std::min(worst, m2p - std::pow(d, p) / n * std::pow(m2, p));
  }
  return {worst >= -1e-9, fmt("50 subspaces, smallest slack %.3e", worst)};
}

Verdict hypercontractivity() {
  bool pass = true;
  std::string detail;
  for (auto [t, k] : {std::pair{2, 1}, {3, 1}}) {
    const Subspace sub = build_Wk(t, k).subspace;
    const HyperBound h = certify_hypercontractivity(sub);
    const double emp = empirical_max_ratio(sub, 100000, static_cast<std::uint64_t>(t));
    pass = pass && h.evidence.report.passed && emp <= h.bound && h.bound <= 9.0 + 1e-3;
    detail += fmt("(t=%d,k=%d) empirical %.4f <= B %.4f; ", t, k, emp, h.bound);
  }
  return {pass, detail};
}

}  // namespace
}  // namespace sos

int main() {
  using namespace sos;
  const std::vector<Criterion> criteria{
      {1, "exact small-graph expansion", 5, small_graphs},
      {2, "Cheeger sandwich", 60, cheeger_sandwich},
      {3, "rounding quality", 600, rounding_quality},
      {4, "local-minima polynomial", 60, local_minima},
      {5, "hypercube refutations", 60, hypercube_refutations},
      {6, "duality dichotomy", 120, duality},
      {7, "pseudo-norm inequalities", 600, pseudo_norms},
      {8, "moment-matched rounding", 120, moment_matching},
      {9, "sparse recovery", 600, sparse_recovery},
      {10, "random subspace 4-norm certification", 300, four_norm_certification},
      {11, "dictionary learning", 1800, dictionary_learning},
      {12, "dimension bound witness", 60, dimension_witness},
      {13, "hypercontractivity", 120, hypercontractivity},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.time_limit;
    const bool pass = v.pass && in_time;
    failed += !pass;
    std::printf("[%s] %2d %s: %s [%.1f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                v.detail.c_str(), secs, c.time_limit, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
