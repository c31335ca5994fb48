#include "sos/hyper.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "sos/errors.hpp"
#include "sos/rng.hpp"

namespace sos {

namespace {

double mean_power(const Eigen::VectorXd& x, int q) {
  return x.array().abs().pow(q).mean();
}

}  // namespace

double moment_ratio(const Eigen::VectorXd& x, int p) {
  if (x.size() == 0 || x.squaredNorm() == 0.0) throw InvalidArgument("zero vector");
  if (p < 1) throw InvalidArgument("p must be positive");
  return mean_power(x, 2 * p) / std::pow(mean_power(x, 2), p);
}

bool is_delta_p_sparse(const Eigen::VectorXd& x, const SparsityQuery& q) {
  if (!(q.delta > 0.0 && q.delta <= 1.0)) throw InvalidArgument("delta must lie in (0, 1]");
  if (q.p < 2) throw InvalidArgument("p must be at least 2");
  const double rhs = std::pow(q.delta, 1 - q.p);
  return moment_ratio(x, q.p) >= rhs * (1.0 - 1e-12);
}

DimWitness dim_bound_witness(const Subspace& sub, int p) {
  if (p < 1) throw InvalidArgument("p must be positive");
  if (sub.dim() < 1) throw InvalidArgument("zero projector");
  const Eigen::MatrixXd P = sub.projector();
  DimWitness out;
  P.diagonal().maxCoeff(&out.coordinate);
  if (!(P(out.coordinate, out.coordinate) > 0.0)) throw InvalidArgument("zero projector");
  out.x = P.col(out.coordinate);
  out.ratio = moment_ratio(out.x, p);
  out.bound = std::pow(static_cast<double>(sub.dim()), p) / static_cast<double>(sub.ambient_dim());
  return out;
}

WkSubspace build_Wk(int t, int k) {
  if (t < 0 || t > kMaxCubeDim) throw InvalidArgument("t must lie in [0, 12]");
  if (k < 0 || k > t) throw InvalidArgument("k must lie in [0, t]");
  const int points = 1 << t;
  std::vector<unsigned> sets;
  for (unsigned s = 0; s < static_cast<unsigned>(points); ++s) {
    if (std::popcount(s) <= k) sets.push_back(s);
  }
  // Characters chi_S(x) = prod_{i in S} x_i are orthogonal with norm 2^{t/2}.
  Eigen::MatrixXd basis(points, static_cast<int>(sets.size()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(points));
  for (int c = 0; c < basis.cols(); ++c) {
    for (unsigned j = 0; j < static_cast<unsigned>(points); ++j) {
      basis(j, c) = (std::popcount(sets[c] & j) % 2 == 0 ? scale : -scale);
    }
  }
  return WkSubspace{t, k, Subspace(std::move(basis))};
}

HyperBound certify_hypercontractivity(const Subspace& sub, const SosOptions& opts) {
  if (sub.ambient_dim() > kMaxHyperAmbient) {
    throw InvalidArgument("ambient dimension exceeds " + std::to_string(kMaxHyperAmbient));
  }
  const int d = sub.dim();
  if (d < 1) throw InvalidArgument("certification needs a nonzero subspace");
  HyperBound out;
  out.evidence = minimize_sos_bound(subspace_quartic(sub), norm_quartic(d),
                                    square_monomial_basis(d), norm_quartic_gram(d), opts);
  if (!out.evidence.report.passed) {
    throw CertificationError("bound certificate fails verification: " +
                             out.evidence.report.violations.front());
  }
  out.rho = out.evidence.bound;
  // E x^4 = |Bc|_4^4 / n and E x^2 = |c|^2 / n for an orthonormal basis.
  out.bound = static_cast<double>(sub.ambient_dim()) * out.rho;
  return out;
}

double empirical_max_ratio(const Subspace& sub, int samples, std::uint64_t seed) {
  if (sub.dim() < 1) throw InvalidArgument("empty subspace");
  CounterRng root(seed);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(s));
    std::vector<double> c = random_unit_vector(rng, static_cast<std::size_t>(sub.dim()));
    Eigen::VectorXd x = sub.basis() * Eigen::Map<const Eigen::VectorXd>(c.data(), sub.dim());
    best = std::max(best, moment_ratio(x, 2));
  }
  return best;
}

SmallSetProjection small_set_to_sparse_vector(const Graph& g, const std::vector<int>& set,
                                              double phi, int p, double c_proj) {
  if (!(c_proj > 0.0)) throw InvalidArgument("c_proj must be positive");
  if (p < 2) throw InvalidArgument("p must be at least 2");
  SmallSetProjection out;
  out.set_phi = phi_of_set(g, set);
  if (out.set_phi > phi + 1e-12) {
    throw InvalidArgument("phi_G(S) = " + std::to_string(out.set_phi) + " exceeds phi");
  }
  const int n = g.num_vertices();
  Eigen::VectorXd indicator = Eigen::VectorXd::Zero(n);
  for (int v : set) indicator(v) = 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.laplacian());
  out.threshold = c_proj * phi;
  // Eigenvalues are accurate to roundoff, so the kernel survives phi = 0.
  const double cut = out.threshold + 1e-9;
  int m = 0;
  while (m < n && es.eigenvalues()(m) <= cut) ++m;
  if (m == 0) throw InvalidArgument("no Laplacian eigenvalue below the threshold");
  const Eigen::MatrixXd V = es.eigenvectors().leftCols(m);
  out.eigenspace_dim = m;
  out.projection = V * (V.transpose() * indicator);
  out.retained_mass = out.projection.squaredNorm() / indicator.squaredNorm();
  out.mass_bound = out.threshold > 0.0 ? 1.0 - out.set_phi / out.threshold : 1.0;
  out.delta = static_cast<double>(std::count(indicator.data(), indicator.data() + n, 1.0)) / n;
  out.p = p;
  out.ratio = moment_ratio(out.projection, p);
  out.sparse = is_delta_p_sparse(out.projection, SparsityQuery{out.delta, p});
  return out;
}

}  // namespace sos
