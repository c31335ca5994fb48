#include "sos/sparse_vec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/QR>

#include "sos/errors.hpp"
#include "sos/rng.hpp"
#include "sos/rounding.hpp"

namespace sos {

Subspace::Subspace(Eigen::MatrixXd basis) : basis_(std::move(basis)) {
  const Eigen::Index d = basis_.cols();
  if (d > basis_.rows()) throw DimensionError("subspace dimension exceeds ambient dimension");
  Eigen::MatrixXd gram = basis_.transpose() * basis_;
  if (d > 0 && (gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
    throw DimensionError("subspace basis is not orthonormal");
  }
}

Subspace Subspace::span(const Eigen::MatrixXd& vectors) {
  const Eigen::Index d = vectors.cols();
  if (d == 0) return Subspace(Eigen::MatrixXd(vectors.rows(), 0));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(vectors);
  qr.setThreshold(1e-10);
  if (qr.rank() < d) throw InvalidArgument("spanning vectors are linearly dependent");
  // Householder QR without pivoting keeps span(first k columns) nested.
  Eigen::HouseholderQR<Eigen::MatrixXd> hqr(vectors);
  Eigen::MatrixXd q = hqr.householderQ() * Eigen::MatrixXd::Identity(vectors.rows(), d);
  return Subspace(std::move(q));
}

double sparsity_ratio(const Eigen::VectorXd& x) {
  double n2 = x.squaredNorm();
  double n4 = x.array().pow(4).sum();
  if (!(n4 > 0.0)) throw InvalidArgument("sparsity ratio of the zero vector");
  return n2 * n2 / n4;
}

SparseInstance generate_instance(int n, int d, int support_size, std::uint64_t seed) {
  if (n < 1 || d < 0 || d >= n) throw InvalidArgument("need 0 <= d < n");
  if (support_size < 1 || support_size > n) throw InvalidArgument("support size out of range");
  CounterRng rng(seed);
  CounterRng support_rng = rng.split(0), sign_rng = rng.split(1);
  CounterRng gauss_rng = rng.split(2), rot_rng = rng.split(3);

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), support_rng);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < support_size; ++i) x0(idx[i]) = (sign_rng() & 1u) ? 1.0 : -1.0;
  x0.normalize();

  Eigen::MatrixXd gauss(n, d);
  for (int j = 0; j < d; ++j) {
    auto g = gaussian_vector(gauss_rng, n);
    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(g.data(), n);
    gauss.col(j) = v - x0.dot(v) * x0;
  }
  Eigen::MatrixXd all(n, d + 1);
  all.col(0) = x0;
  all.rightCols(d) = gauss;
  Subspace ordered = Subspace::span(all);

  // Random rotation hides x0 among the basis vectors.
  Eigen::MatrixXd g(d + 1, d + 1);
  for (int i = 0; i <= d; ++i) {
    auto row = gaussian_vector(rot_rng, d + 1);
    for (int j = 0; j <= d; ++j) g(i, j) = row[j];
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd rot = qr.householderQ();

  SparseInstance inst;
  inst.planted = x0;
  inst.subspace = Subspace(ordered.basis() * rot);
  inst.complement = Subspace(ordered.basis().rightCols(d));
  inst.mu = support_size;
  inst.mu0 = sparsity_ratio(x0);
  return inst;
}

Polynomial subspace_quartic(const Subspace& sub) {
  const int d = sub.dim();
  const auto ud = static_cast<std::size_t>(d);
  Polynomial q(ud);
  const Eigen::MatrixXd& B = sub.basis();
  for (Eigen::Index i = 0; i < B.rows(); ++i) {
    std::vector<double> row(d);
    for (int j = 0; j < d; ++j) row[j] = B(i, j);
    Polynomial l = Polynomial::linear_form(row).with_num_vars(ud);
    Polynomial l2 = l * l;
    q += l2 * l2;
  }
  return q;
}

Polynomial norm_quartic(int d) {
  const auto ud = static_cast<std::size_t>(d);
  Polynomial s(ud);
  for (int i = 0; i < d; ++i) s += Polynomial::monomial(ud, Monomial::variable(i, 2));
  return s * s;
}

std::vector<Monomial> square_monomial_basis(int d) {
  return monomials_of_degree(static_cast<std::size_t>(d), 2);
}

Eigen::MatrixXd norm_quartic_gram(int d) {
  auto basis = square_monomial_basis(d);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    // c_i^2 carries c_i^4; c_i c_j carries the 2 c_i^2 c_j^2 cross term.
    g(i, i) = basis[i].factors().size() == 1 ? 1.0 : 2.0;
  }
  return g;
}

Polynomial gaussian_quartic_expectation(int d) {
  const auto ud = static_cast<std::size_t>(d);
  Polynomial out(ud);
  auto double_factorial = [](int k) {
    double r = 1.0;
    for (int j = k; j > 1; j -= 2) r *= j;
    return r;
  };
  for (const auto& m : monomials_of_degree(ud, 4)) {
    double coef = 24.0;  // 4! / prod alpha_i!
    double moment = 1.0;
    bool even = true;
    for (auto [var, pow] : m.factors()) {
      double f = 1.0;
      for (std::uint32_t k = 2; k <= pow; ++k) f *= k;
      coef /= f;
      if (pow % 2 != 0) even = false;
      moment *= double_factorial(static_cast<int>(pow) - 1);
    }
    if (even) out.add_term(m, coef * moment);
  }
  return out;
}

RecoveryReport recover(const SparseInstance& inst, const RecoveryOptions& opts) {
  return recover(inst.subspace, inst.mu0, &inst.planted, opts);
}

RecoveryReport recover(const Subspace& sub, double mu0, const Eigen::VectorXd* planted,
                       const RecoveryOptions& opts) {
  const int d = sub.dim();
  if (d < 1) throw InvalidArgument("recovery needs a nonzero subspace");
  if (d > kMaxRecoveryDim) {
    throw DimensionError("subspace dimension " + std::to_string(d) + " exceeds " +
                         std::to_string(kMaxRecoveryDim));
  }
  if (!(mu0 >= 1.0)) throw InvalidArgument("mu0 must be at least 1");
  if (opts.samples < 1) throw InvalidArgument("sample count must be positive");
  if (planted && planted->size() != sub.ambient_dim()) {
    throw DimensionError("planted vector does not match the ambient dimension");
  }
  const auto ud = static_cast<std::size_t>(d);
  PolynomialSystem sys(ud);
  sys.objective = -subspace_quartic(sub);
  Polynomial norm(ud);
  for (int i = 0; i < d; ++i) norm += Polynomial::monomial(ud, Monomial::variable(i, 2));
  sys.equalities.push_back(norm - Polynomial::constant(ud, 1.0));

  EstimateReport est = sos_estimate(sys, opts.degree, opts.sos);
  RecoveryReport rep;
  rep.objective = -est.estimate;
  rep.threshold = (1.0 - opts.opt_slack) / mu0;
  rep.sdp_iterations = est.iterations;
  rep.witness = est.witness;
  if (rep.objective < rep.threshold) {
    throw NoSparseVectorError("pseudo-expected 4-norm " + std::to_string(rep.objective) +
                              " below threshold " + std::to_string(rep.threshold));
  }
  const Eigen::MatrixXd& B = sub.basis();
  if (planted) {
    Eigen::VectorXd c0 = B.transpose() * *planted;
    rep.pe_alpha0_sq = c0.dot(est.witness.second_moments() * c0);
  }
  GaussianSampler sampler = match_two_moments(est.witness, opts.sos.psd_tol);
  auto draws = sample(sampler, static_cast<std::size_t>(opts.samples), opts.seed);
  double best = -1.0;
  for (const auto& c : draws) {
    Eigen::VectorXd x = B * c;
    double nx = x.norm();
    if (!(nx > 1e-12)) continue;
    x /= nx;
    double v = x.array().pow(4).sum();
    if (v > best) {
      best = v;
      rep.recovered = x;
    }
  }
  if (best < 0.0) throw RoundingError("every rounding sample was zero");
  rep.recovered_4norm = best;
  if (planted) {
    double c = rep.recovered.dot(*planted);
    rep.correlation = std::min(1.0, c * c);
  }
  return rep;
}

FourNormCertificate certify_subspace_4norm(const Subspace& sub, const SosOptions& opts) {
  const int d = sub.dim();
  if (d < 1) throw InvalidArgument("certification needs a nonzero subspace");
  FourNormCertificate out;
  out.evidence = minimize_sos_bound(subspace_quartic(sub), norm_quartic(d),
                                    square_monomial_basis(d), norm_quartic_gram(d), opts);
  if (!out.evidence.report.passed) {
    throw CertificationError("bound certificate fails verification: " +
                             out.evidence.report.violations.front());
  }
  out.rho = out.evidence.bound;
  if (out.rho > 1.0 + 1e-6) {
    throw CertificationError("certified bound " + std::to_string(out.rho) +
                             " exceeds the trivial bound 1");
  }
  out.mu_prime = 1.0 / std::max(out.rho, 1e-300);
  return out;
}

}  // namespace sos
