#include "sos/expansion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sos/errors.hpp"
#include "sos/rng.hpp"
#include "sos/rounding.hpp"

namespace sos {

Graph::Graph(int n, int d, std::vector<std::pair<int, int>> edges)
    : n_(n), d_(d), edges_(std::move(edges)) {
  if (n < 1) throw InvalidArgument("graph needs at least one vertex");
  if (d < 0) throw InvalidArgument("degree must be non-negative");
  std::vector<int> deg(n, 0);
  std::set<std::pair<int, int>> seen;
  for (auto& [u, v] : edges_) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw InvalidArgument("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                            ") out of range");
    }
    if (u == v) throw InvalidArgument("self-loop at vertex " + std::to_string(u));
    if (u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second) {
      throw InvalidArgument("duplicate edge (" + std::to_string(u) + ", " + std::to_string(v) + ")");
    }
    ++deg[u];
    ++deg[v];
  }
  for (int i = 0; i < n; ++i) {
    if (deg[i] != d) {
      throw InvalidArgument("vertex " + std::to_string(i) + " has degree " +
                            std::to_string(deg[i]) + ", expected " + std::to_string(d));
    }
  }
}

Graph Graph::parse(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_content = [&](std::string& out) {
    while (std::getline(in, line)) {
      ++line_no;
      auto pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos || line[pos] == '#') continue;
      out = line;
      return true;
    }
    return false;
  };
  std::string content;
  if (!next_content(content)) throw InvalidArgument("graph file is empty");
  int n = 0, d = 0;
  {
    std::istringstream ss(content);
    std::string extra;
    if (!(ss >> n >> d) || (ss >> extra)) {
      throw InvalidArgument("line " + std::to_string(line_no) + ": expected \"n d\"");
    }
  }
  std::vector<std::pair<int, int>> edges;
  while (next_content(content)) {
    std::istringstream ss(content);
    int u = 0, v = 0;
    std::string extra;
    if (!(ss >> u >> v) || (ss >> extra)) {
      throw InvalidArgument("line " + std::to_string(line_no) + ": expected \"u v\"");
    }
    edges.emplace_back(u, v);
  }
  try {
    return Graph(n, d, std::move(edges));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string("graph file: ") + e.what());
  }
}

Graph Graph::parse_string(const std::string& text) {
  std::istringstream ss(text);
  return parse(ss);
}

std::string Graph::to_string() const {
  std::ostringstream out;
  out << n_ << ' ' << d_ << '\n';
  for (auto [u, v] : edges_) out << u << ' ' << v << '\n';
  return out.str();
}

Graph Graph::complete(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  }
  return Graph(n, n - 1, std::move(e));
}

Graph Graph::cycle(int n) {
  if (n < 3) throw InvalidArgument("cycle needs at least three vertices");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph(n, 2, std::move(e));
}

Graph Graph::disjoint_union(const Graph& a, const Graph& b) {
  if (a.d_ != b.d_) throw InvalidArgument("union of graphs with different degrees");
  auto e = a.edges_;
  for (auto [u, v] : b.edges_) e.emplace_back(u + a.n_, v + a.n_);
  return Graph(a.n_ + b.n_, a.d_, std::move(e));
}

Graph Graph::random_regular(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 0 || d >= n || (static_cast<long>(n) * d) % 2 != 0) {
    throw InvalidArgument("no simple " + std::to_string(d) + "-regular graph on " +
                          std::to_string(n) + " vertices");
  }
  CounterRng rng(seed);
  std::vector<int> points(static_cast<std::size_t>(n) * d);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    for (int i = 0; i < n * d; ++i) points[i] = i / d;
    std::shuffle(points.begin(), points.end(), rng);
    std::set<std::pair<int, int>> seen;
    bool ok = true;
    for (std::size_t i = 0; i < points.size(); i += 2) {
      int u = std::min(points[i], points[i + 1]), v = std::max(points[i], points[i + 1]);
      if (u == v || !seen.insert({u, v}).second) {
        ok = false;
        break;
      }
    }
    if (ok) return Graph(n, d, {seen.begin(), seen.end()});
  }
  throw InvalidArgument("pairing model did not produce a simple graph");
}

Eigen::MatrixXd Graph::adjacency() const {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_, n_);
  for (auto [u, v] : edges_) {
    A(u, v) = 1.0;
    A(v, u) = 1.0;
  }
  return A;
}

Eigen::MatrixXd Graph::laplacian() const {
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n_, n_);
  if (d_ > 0) L -= adjacency() / d_;
  return L;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> Graph::spectrum() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(adjacency());
  return {es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse()};
}

double phi_of_set(const Graph& g, const std::vector<int>& set) {
  const int n = g.num_vertices();
  if (set.empty()) throw InvalidArgument("expansion of the empty set");
  std::vector<char> in(n, 0);
  for (int v : set) {
    if (v < 0 || v >= n) throw InvalidArgument("vertex " + std::to_string(v) + " out of range");
    if (in[v]) throw InvalidArgument("vertex " + std::to_string(v) + " repeated");
    in[v] = 1;
  }
  if (g.degree() == 0) return 0.0;
  int cut = 0;
  for (auto [u, v] : g.edges()) cut += in[u] != in[v];
  return static_cast<double>(cut) / (static_cast<double>(g.degree()) * set.size());
}

BruteForceResult brute_force_phi(const Graph& g, std::optional<int> size, int max_n) {
  const int n = g.num_vertices();
  if (n > max_n) {
    throw InvalidArgument("brute force limited to " + std::to_string(max_n) + " vertices");
  }
  if (size && (*size < 1 || *size > n)) throw InvalidArgument("set size out of range");
  if (!size && n < 2) throw InvalidArgument("no admissible set with |S| <= n / 2");
  BruteForceResult best;
  best.phi = std::numeric_limits<double>::infinity();
  const std::uint32_t total = 1u << n;
  for (std::uint32_t mask = 1; mask < total; ++mask) {
    int c = std::popcount(mask);
    if (size ? c != *size : 2 * c > n) continue;
    int cut = 0;
    for (auto [u, v] : g.edges()) cut += ((mask >> u) & 1u) != ((mask >> v) & 1u);
    double phi = g.degree() == 0 ? 0.0 : static_cast<double>(cut) / (g.degree() * c);
    if (phi < best.phi) {
      best.phi = phi;
      best.argmin.clear();
      for (int i = 0; i < n; ++i) {
        if ((mask >> i) & 1u) best.argmin.push_back(i);
      }
    }
  }
  return best;
}

SpectralBounds spectral_bounds(const Graph& g) {
  SpectralBounds b;
  if (g.num_vertices() < 2 || g.degree() == 0) return b;
  auto [vals, vecs] = g.spectrum();
  const double d = g.degree();
  b.lambda2 = vals(1);
  double gap = std::max(0.0, (d - b.lambda2) / (2.0 * d));
  b.lower = gap;
  b.upper = 2.0 * std::sqrt(gap);
  return b;
}

PolynomialSystem expansion_system(const Graph& g, ExpansionMode mode, int k) {
  const int n = g.num_vertices();
  const auto un = static_cast<std::size_t>(n);
  PolynomialSystem sys(un);
  Polynomial cut(un);
  for (auto [u, v] : g.edges()) {
    Polynomial diff = Polynomial::variable(un, u) - Polynomial::variable(un, v);
    cut += diff * diff;
  }
  Polynomial sum(un), sumsq(un);
  for (int i = 0; i < n; ++i) {
    sum += Polynomial::variable(un, i);
    sumsq += Polynomial::monomial(un, Monomial::variable(i, 2));
  }
  const double d = std::max(1, g.degree());
  if (mode == ExpansionMode::relaxed) {
    sys.objective = cut * (2.0 / (d * n));
    sys.equalities.push_back(sum - Polynomial::constant(un, n / 2.0));
    sys.equalities.push_back(sumsq - Polynomial::constant(un, n / 2.0));
  } else {
    sys.objective = cut * (1.0 / (d * k));
    for (int i = 0; i < n; ++i) {
      sys.equalities.push_back(Polynomial::monomial(un, Monomial::variable(i, 2)) -
                               Polynomial::variable(un, i));
    }
    sys.equalities.push_back(sum - Polynomial::constant(un, k));
  }
  return sys;
}

EstimateReport sos2_estimate(const Graph& g, ExpansionMode mode, std::optional<int> k, int degree,
                             const SosOptions& opts) {
  const int n = g.num_vertices();
  int kk = k.value_or(n / 2);
  if (mode == ExpansionMode::exact && (kk < 1 || 2 * kk > n)) {
    throw InvalidArgument("set size k = " + std::to_string(kk) + " outside [1, n/2]");
  }
  if (mode == ExpansionMode::relaxed && k && *k != n / 2) {
    throw InvalidArgument("relaxed mode fixes k = n / 2");
  }
  return sos_estimate(expansion_system(g, mode, kk), degree, opts);
}

RoundingResult round_expansion(const Graph& g, const PseudoExpectation& pe,
                               const RoundingOptions& opts) {
  const int n = g.num_vertices();
  if (pe.num_vars() != static_cast<std::size_t>(n)) {
    throw DimensionError("pseudoexpectation has " + std::to_string(pe.num_vars()) +
                         " variables for a graph on " + std::to_string(n) + " vertices");
  }
  if (opts.max_draws < 1) throw InvalidArgument("max_draws must be positive");
  GaussianSampler sampler = match_two_moments(pe, opts.psd_tol);
  auto draws = sample(sampler, static_cast<std::size_t>(opts.max_draws), opts.seed);
  RoundingResult best;
  best.phi = std::numeric_limits<double>::infinity();
  for (const auto& y : draws) {
    ++best.draws_used;
    std::vector<int> in, out;
    for (int i = 0; i < n; ++i) (y(i) >= 0.5 ? in : out).push_back(i);
    if (2 * in.size() > static_cast<std::size_t>(n)) std::swap(in, out);
    if (in.empty()) {
      ++best.empty_draws;
      continue;
    }
    double phi = phi_of_set(g, in);
    if (phi < best.phi) {
      best.phi = phi;
      best.set = std::move(in);
    }
  }
  if (best.set.empty()) {
    throw RoundingError("all " + std::to_string(opts.max_draws) + " rounding draws were empty");
  }
  return best;
}

ExpansionReport analyze_expansion(const Graph& g, ExpansionMode mode, std::optional<int> k,
                                  const RoundingOptions& rounding, const SosOptions& opts) {
  const int n = g.num_vertices();
  if (n < 2) throw InvalidArgument("expansion needs at least two vertices");
  ExpansionReport rep;
  rep.mode = mode;
  rep.k = k.value_or(n / 2);
  if (n <= kMaxBruteForceVertices) {
    auto bf = brute_force_phi(g);
    rep.phi_true = bf.phi;
    rep.phi_true_set = bf.argmin;
  }
  rep.spectral = spectral_bounds(g);
  EstimateReport est = sos2_estimate(g, mode, k, 2, opts);
  rep.phi_sos2 = est.estimate;
  rep.sdp_iterations = est.iterations;
  const EstimateReport* half = &est;
  EstimateReport exact_half;
  if (mode != ExpansionMode::exact || rep.k != n / 2) {
    exact_half = sos2_estimate(g, ExpansionMode::exact, n / 2, 2, opts);
    half = &exact_half;
  }
  auto r = round_expansion(g, half->witness, rounding);
  rep.rounded_set = r.set;
  rep.phi_of_rounded = r.phi;
  return rep;
}

}  // namespace sos
