#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sos/moment.hpp"

namespace sos {

// Undirected d-regular graph without loops or parallel edges.
class Graph {
 public:
  Graph() = default;
  // Throws InvalidArgument unless every vertex has exactly d incident edges.
  Graph(int n, int d, std::vector<std::pair<int, int>> edges);

  // "n d" on the first line, then one 0-indexed edge "u v" per line. Errors
  // carry the offending line number.
  static Graph parse(std::istream& in);
  static Graph parse_string(const std::string& text);
  std::string to_string() const;

  static Graph complete(int n);
  static Graph cycle(int n);
  // Disjoint union of two copies.
  static Graph disjoint_union(const Graph& a, const Graph& b);
  // Uniform random d-regular graph by the pairing model with rejection.
  static Graph random_regular(int n, int d, std::uint64_t seed);

  int num_vertices() const noexcept { return n_; }
  int degree() const noexcept { return d_; }
  const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }

  Eigen::MatrixXd adjacency() const;
  // L = I - A / d.
  Eigen::MatrixXd laplacian() const;
  // Eigenvalues of A in descending order with matching eigenvector columns.
  std::pair<Eigen::VectorXd, Eigen::MatrixXd> spectrum() const;

 private:
  int n_ = 0;
  int d_ = 0;
  std::vector<std::pair<int, int>> edges_;
};

// |E(S, V \ S)| / (d |S|). Throws InvalidArgument on an empty or
// out-of-range set.
double phi_of_set(const Graph& g, const std::vector<int>& set);

struct BruteForceResult {
  double phi = 0.0;
  std::vector<int> argmin;
};

constexpr int kMaxBruteForceVertices = 16;

// Minimum of phi_of_set over 1 <= |S| <= n / 2, or over |S| = size when size
// is given.
BruteForceResult brute_force_phi(const Graph& g, std::optional<int> size = std::nullopt,
                                 int max_n = kMaxBruteForceVertices);

struct SpectralBounds {
  double lambda2 = 0.0;
  double lower = 0.0;  // (d - lambda2) / 2d
  double upper = 0.0;  // 2 sqrt((d - lambda2) / 2d)
};

SpectralBounds spectral_bounds(const Graph& g);

enum class ExpansionMode { relaxed, exact };

// relaxed: minimize 2 L(sum_E (x_i - x_j)^2) / (d n) subject to
//   sum x_i = n / 2 and sum x_i^2 = n / 2.
// exact: minimize L(sum_E (x_i - x_j)^2) / (d k) subject to
//   x_i^2 = x_i and sum x_i = k.
PolynomialSystem expansion_system(const Graph& g, ExpansionMode mode, int k);

// Throws InvalidArgument when k > n / 2 (exact mode) or k < 1.
EstimateReport sos2_estimate(const Graph& g, ExpansionMode mode, std::optional<int> k = std::nullopt,
                             int degree = 2, const SosOptions& opts = {});

struct RoundingOptions {
  int max_draws = 20;
  std::uint64_t seed = 0;
  double psd_tol = 1e-7;
};

struct RoundingResult {
  std::vector<int> set;
  double phi = 0.0;
  int draws_used = 0;
  int empty_draws = 0;
};

// Threshold Gaussian samples at 1/2, complement sets larger than n / 2,
// keep the best non-empty set. Throws RoundingError when every draw is
// empty.
RoundingResult round_expansion(const Graph& g, const PseudoExpectation& pe,
                               const RoundingOptions& opts = {});

struct ExpansionReport {
  std::optional<double> phi_true;
  std::vector<int> phi_true_set;
  SpectralBounds spectral;
  double phi_sos2 = 0.0;
  ExpansionMode mode = ExpansionMode::relaxed;
  int k = 0;
  std::vector<int> rounded_set;
  double phi_of_rounded = 0.0;
  int sdp_iterations = 0;
};

// Brute force (when n <= kMaxBruteForceVertices), spectral bounds, the SOS
// estimate in the requested mode, and rounding of the exact k = n / 2
// pseudodistribution.
ExpansionReport analyze_expansion(const Graph& g, ExpansionMode mode, std::optional<int> k,
                                  const RoundingOptions& rounding = {}, const SosOptions& opts = {});

}  // namespace sos
