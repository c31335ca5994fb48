#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sos/certificate.hpp"
#include "sos/expansion.hpp"
#include "sos/sparse_vec.hpp"

namespace sos {

// Expectations below are averages over coordinates: E x^q = (1/n) sum_i x_i^q.
struct SparsityQuery {
  double delta = 1.0;  // in (0, 1]
  int p = 2;           // >= 2
};

// E x^{2p} >= delta^{1-p} (E x^2)^p, up to a relative 1e-12 for ties.
// Throws InvalidArgument on a zero vector or an out-of-range query.
bool is_delta_p_sparse(const Eigen::VectorXd& x, const SparsityQuery& q);
// E x^{2p} / (E x^2)^p.
double moment_ratio(const Eigen::VectorXd& x, int p);

struct DimWitness {
  Eigen::VectorXd x;  // P e_i for the selected coordinate i
  int coordinate = 0;
  double ratio = 0.0;  // E x^{2p} / (E x^2)^p
  double bound = 0.0;  // d^p / n, never above ratio
};

// Picks the column of the projector maximizing (x^i_i)^2 / |x^i|^2, which
// equals the diagonal entry P_ii.
DimWitness dim_bound_witness(const Subspace& sub, int p);

constexpr int kMaxCubeDim = 12;

// Evaluations of the multilinear monomials of degree <= k on {+-1}^t,
// normalized. Point j has x_i = -1 exactly when bit i of j is set.
struct WkSubspace {
  int t = 0;
  int k = 0;
  Subspace subspace;
};

WkSubspace build_Wk(int t, int k);

constexpr int kMaxHyperAmbient = 256;

struct HyperBound {
  double bound = 0.0;  // certified B with E x^4 <= B (E x^2)^2 on the subspace
  double rho = 0.0;    // certified max of |B c|_4^4 over unit c
  BoundCertificate evidence;
};

// Degree-4 certificate over subspace coordinates c; B = n * rho. Throws
// CertificationError when the certificate fails verification.
HyperBound certify_hypercontractivity(const Subspace& sub, const SosOptions& opts = {});

// Largest E x^4 / (E x^2)^2 over `samples` random unit coefficient vectors.
double empirical_max_ratio(const Subspace& sub, int samples, std::uint64_t seed);

struct SmallSetProjection {
  Eigen::VectorXd projection;  // of the indicator onto the low eigenspace
  int eigenspace_dim = 0;
  double threshold = 0.0;      // c_proj * phi
  double set_phi = 0.0;        // phi_G(S)
  double retained_mass = 0.0;  // |P 1_S|^2 / |1_S|^2
  double mass_bound = 0.0;     // 1 - phi_G(S) / threshold, or 1 when threshold is 0
  double delta = 0.0;          // |S| / n
  int p = 2;
  double ratio = 0.0;          // moment_ratio of the projection
  bool sparse = false;         // (delta, p)-sparsity of the projection
};

constexpr double kProjectionConstant = 2.0;

// Projects 1_S onto the span of Laplacian eigenvectors with eigenvalue at
// most c_proj * phi. Throws InvalidArgument unless phi_G(S) <= phi.
SmallSetProjection small_set_to_sparse_vector(const Graph& g, const std::vector<int>& set,
                                              double phi, int p = 2,
                                              double c_proj = kProjectionConstant);

}  // namespace sos
