#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sos/moment.hpp"

namespace sos {

// n x m matrix with unit columns; kappa = m / n.
class Dictionary {
 public:
  Dictionary() = default;
  // Throws InvalidArgument unless every column has unit norm to 1e-10.
  explicit Dictionary(Eigen::MatrixXd a);

  static Dictionary identity(int n);
  static Dictionary random_orthogonal(int n, std::uint64_t seed);

  const Eigen::MatrixXd& matrix() const noexcept { return a_; }
  int rows() const noexcept { return static_cast<int>(a_.rows()); }
  int cols() const noexcept { return static_cast<int>(a_.cols()); }
  double kappa() const noexcept { return static_cast<double>(a_.cols()) / a_.rows(); }
  // max over probes u of | |A^T u|^2 / (kappa |u|^2) - 1 |.
  double isotropy_error(int probes, std::uint64_t seed) const;
  std::vector<Eigen::VectorXd> columns() const;

 private:
  Eigen::MatrixXd a_;
};

// x_i = sigma_i b_i rho^(-1/d) with random signs and b_i ~ Bernoulli(rho):
// E x_i^d = 1 and E x_i^(d/2) x_j^(d/2) = rho = tau.
struct NiceDistSpec {
  int d = 4;
  double rho = 0.2;
  double tau() const noexcept { return rho; }
};

// count x m matrix of i.i.d. rows.
Eigen::MatrixXd sample_nice(const NiceDistSpec& spec, int m, int count, std::uint64_t seed);

// Rows y = A x for x drawn by sample_nice.
Eigen::MatrixXd sample_observations(const Dictionary& dict, const NiceDistSpec& spec, int count,
                                    std::uint64_t seed);

// P(u) = (1/R) sum_r <y_r, u>^d over the rows y_r of samples.
Polynomial empirical_poly(const Eigen::MatrixXd& samples, int d);

struct ColumnOptions {
  int degree = 6;
  int n_forms = 1;
  int max_retries = 50;      // F_max fresh choices of W
  int samples = 20;          // Gaussian draws per W
  double slack = 0.1;
  double isolation_floor = 0.9;
  SosOptions sos;
};

struct ColumnResult {
  Eigen::VectorXd column;     // unit vector
  double objective = 0.0;     // pseudo-expected P
  double isolation = 0.0;     // top eigenvalue share of the reweighted second moments
  double p_value = 0.0;       // P(column)
  int retries_used = 0;
  int sdp_iterations = 0;
};

// Maximizes the pseudo-expected P on the sphere (plus the given
// deflation inequalities), reweights by W^2 for W a product of n_forms random
// linear forms, and rounds the reweighted second moments. Throws
// NoColumnError when the objective is below 1 - tau - slack and
// IsolationError when no W isolates a direction.
ColumnResult learn_one_column(const Polynomial& p, double tau, std::uint64_t seed,
                              const ColumnOptions& opts = {},
                              const std::vector<Polynomial>& inequalities = {});

struct LearnOptions {
  ColumnOptions column;
  double gap = 0.5;  // deflation: <u, a*>^2 <= 1 - gap
  int max_failures = 2;
};

struct LearnReport {
  std::vector<Eigen::VectorXd> columns;
  std::vector<ColumnResult> diagnostics;
  std::optional<double> hausdorff;  // to the truth, when given
  bool stalled = false;
  std::string stall_reason;
};

// Recovers up to m = round(kappa * n) columns one at a time.
LearnReport learn_dictionary(const Eigen::MatrixXd& samples, const NiceDistSpec& spec,
                             double kappa, std::uint64_t seed, const LearnOptions& opts = {},
                             const Dictionary* truth = nullptr);

// Hausdorff distance between S u -S and T u -T. Both sets must be nonempty.
double symmetrized_hausdorff(const std::vector<Eigen::VectorXd>& s,
                             const std::vector<Eigen::VectorXd>& t);

}  // namespace sos
