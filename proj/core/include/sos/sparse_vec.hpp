#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sos/certificate.hpp"
#include "sos/moment.hpp"

namespace sos {

// Linear subspace of R^n held as an orthonormal basis (columns).
class Subspace {
 public:
  Subspace() = default;
  // Columns must already be orthonormal to 1e-10 (DimensionError otherwise).
  explicit Subspace(Eigen::MatrixXd basis);
  // Orthonormalizes the columns; throws InvalidArgument if they are rank
  // deficient.
  static Subspace span(const Eigen::MatrixXd& vectors);

  int ambient_dim() const noexcept { return static_cast<int>(basis_.rows()); }
  int dim() const noexcept { return static_cast<int>(basis_.cols()); }
  const Eigen::MatrixXd& basis() const noexcept { return basis_; }
  Eigen::MatrixXd projector() const { return basis_ * basis_.transpose(); }

 private:
  Eigen::MatrixXd basis_;
};

struct SparseInstance {
  Eigen::VectorXd planted;  // x0, unit norm
  Subspace subspace;        // span of x0 and the Gaussian part, rotated
  Subspace complement;      // span of the Gaussian part alone (orthogonal to x0)
  double mu = 0.0;          // |supp x0|
  double mu0 = 0.0;         // |x0|_2^4 / |x0|_4^4
};

// x0 has unit magnitudes with random signs on a random support, normalized.
SparseInstance generate_instance(int n, int d, int support_size, std::uint64_t seed);

// mu0 of an arbitrary nonzero vector.
double sparsity_ratio(const Eigen::VectorXd& x);

struct RecoveryOptions {
  int degree = 4;
  int samples = 20;
  double opt_slack = 0.05;
  std::uint64_t seed = 0;
  SosOptions sos;
};

struct RecoveryReport {
  Eigen::VectorXd recovered;    // unit vector in the subspace
  double correlation = 0.0;     // <x*, x0>^2
  double objective = 0.0;       // pseudo-expected |u|_4^4 at the optimum
  double threshold = 0.0;       // (1 - opt_slack) / mu0
  double pe_alpha0_sq = 0.0;    // pseudo-expected <u, x0>^2
  double recovered_4norm = 0.0; // |x*|_4^4
  PseudoExpectation witness;    // over subspace coordinates c, u = B c
  int sdp_iterations = 0;
};

// Maximizes the pseudo-expected |u|_4^4 over u = B c with |c|^2 = 1 and
// rounds Gaussian samples matching the second moments of c. Throws
// NoSparseVectorError when the optimum falls below the threshold.
RecoveryReport recover(const SparseInstance& inst, const RecoveryOptions& opts = {});
RecoveryReport recover(const Subspace& sub, double mu0, const Eigen::VectorXd* planted,
                       const RecoveryOptions& opts = {});

constexpr int kMaxRecoveryDim = 20;

// sum_i <b_i, c>^4 over the rows b_i of the basis: |B c|_4^4 as a form in c.
Polynomial subspace_quartic(const Subspace& sub);
// |c|_2^4.
Polynomial norm_quartic(int d);
// Degree-2 monomials in d variables and the diagonal Gram matrix of |c|^4
// over them.
std::vector<Monomial> square_monomial_basis(int d);
Eigen::MatrixXd norm_quartic_gram(int d);

// E <w, c>^4 for standard Gaussian w, built term by term from Isserlis'
// formula; equals 3 |c|^4.
Polynomial gaussian_quartic_expectation(int d);

struct FourNormCertificate {
  double rho = 0.0;       // certified max of |B c|_4^4 on the unit sphere
  double mu_prime = 0.0;  // 1 / rho
  BoundCertificate evidence;
};

// Certifies |P u|_4^4 <= |u|_2^4 / mu' for u in the subspace. Throws
// CertificationError when rho exceeds the trivial bound 1.
FourNormCertificate certify_subspace_4norm(const Subspace& sub, const SosOptions& opts = {});

}  // namespace sos
