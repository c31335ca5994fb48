#include "sos/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "sos/errors.hpp"

namespace sos {

Polynomial gram_to_polynomial(std::size_t num_vars, const std::vector<Monomial>& basis,
                              const Eigen::MatrixXd& gram) {
  const int B = static_cast<int>(basis.size());
  if (gram.rows() != B || gram.cols() != B) throw DimensionError("gram does not match basis");
  Polynomial p(num_vars);
  for (int a = 0; a < B; ++a) {
    for (int b = a; b < B; ++b) {
      double v = a == b ? gram(a, a) : gram(a, b) + gram(b, a);
      if (v != 0.0) p.add_term(basis[a] * basis[b], v);
    }
  }
  return p;
}

Polynomial SosCertificate::gram_polynomial() const {
  return gram_to_polynomial(num_vars, basis, gram);
}

IdentityReport verify_sos_identity(const Polynomial& target, const std::vector<Monomial>& basis,
                                   const Eigen::MatrixXd& gram, double id_tol, double psd_tol) {
  IdentityReport rep;
  Polynomial diff = target - gram_to_polynomial(target.num_vars(), basis, gram);
  rep.identity_residual = diff.max_abs_coefficient();
  if (rep.identity_residual > id_tol) {
    rep.violations.push_back("identity residual " + std::to_string(rep.identity_residual));
  }
  if (gram.size() > 0) {
    if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, gram.cwiseAbs().maxCoeff())) {
      rep.violations.push_back("gram matrix is not symmetric");
    }
    rep.lambda_min = lambda_min(0.5 * (gram + gram.transpose()));
  }
  if (rep.lambda_min < -psd_tol) {
    rep.violations.push_back("gram eigenvalue " + std::to_string(rep.lambda_min));
  }
  rep.passed = rep.violations.empty();
  return rep;
}

IdentityReport verify_certificate(const PolynomialSystem& system, const SosCertificate& cert,
                                  double id_tol, double psd_tol) {
  system.validate();
  IdentityReport rep;
  PolynomialSystem sys = cert.ball_radius_sq ? with_ball(system, *cert.ball_radius_sq) : system;
  if (cert.num_vars != sys.num_vars) {
    rep.violations.push_back("certificate has " + std::to_string(cert.num_vars) +
                             " variables, system has " + std::to_string(sys.num_vars));
    return rep;
  }
  if (cert.multipliers.size() != sys.equalities.size()) {
    rep.violations.push_back("certificate has " + std::to_string(cert.multipliers.size()) +
                             " multipliers for " + std::to_string(sys.equalities.size()) +
                             " equalities");
    return rep;
  }
  Polynomial total = cert.gram_polynomial() + Polynomial::constant(sys.num_vars, 1.0);
  for (std::size_t i = 0; i < sys.equalities.size(); ++i) {
    if (cert.multipliers[i].num_vars() != sys.num_vars) {
      rep.violations.push_back("multiplier " + std::to_string(i) + " has wrong dimension");
      return rep;
    }
    Polynomial term = cert.multipliers[i] * sys.equalities[i];
    if (!term.is_zero() && term.degree() > cert.degree) {
      rep.violations.push_back("multiplier " + std::to_string(i) + " exceeds degree " +
                               std::to_string(cert.degree));
    }
    total += term;
  }
  for (const auto& m : cert.basis) {
    if (2 * m.degree() > cert.degree) {
      rep.violations.push_back("gram basis monomial " + m.to_string() + " exceeds degree");
      break;
    }
  }
  rep.identity_residual = total.max_abs_coefficient();
  if (rep.identity_residual > id_tol) {
    rep.violations.push_back("identity residual " + std::to_string(rep.identity_residual));
  }
  if (cert.gram.size() > 0) {
    rep.lambda_min = lambda_min(0.5 * (cert.gram + cert.gram.transpose()));
  }
  if (rep.lambda_min < -psd_tol) {
    rep.violations.push_back("gram eigenvalue " + std::to_string(rep.lambda_min));
  }
  rep.passed = rep.violations.empty();
  return rep;
}

namespace {

// Identity z^T G z + sum_k u_k E_k = T with G supported on a block partition
// of the basis. Alternates an exact affine projection in (svec G, u) with
// PSD projection of the blocks, finishing on the affine side.
class GramPolisher {
 public:
  GramPolisher(std::size_t num_vars, std::vector<Monomial> basis,
               std::vector<std::vector<int>> blocks, std::vector<Polynomial> extras,
               const Polynomial& target)
      : basis_(std::move(basis)), blocks_(std::move(blocks)), extras_(std::move(extras)) {
    (void)num_vars;
    std::unordered_map<Monomial, int, MonomialHash> row_of;
    auto row = [&](const Monomial& m) {
      auto [it, inserted] = row_of.try_emplace(m, static_cast<int>(row_of.size()));
      return it->second;
    };
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
      const auto& idx = blocks_[bi];
      for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = i; j < idx.size(); ++j) {
          entries_.push_back({static_cast<int>(bi), static_cast<int>(i), static_cast<int>(j),
                              row(basis_[idx[i]] * basis_[idx[j]])});
        }
      }
    }
    std::vector<std::vector<std::pair<int, double>>> extra_rows(extras_.size());
    for (std::size_t k = 0; k < extras_.size(); ++k) {
      for (const auto& [m, c] : extras_[k].terms()) extra_rows[k].emplace_back(row(m), c);
    }
    std::vector<std::pair<int, double>> target_rows;
    for (const auto& [m, c] : target.terms()) target_rows.emplace_back(row(m), c);

    const int R = static_cast<int>(row_of.size());
    const int ng = static_cast<int>(entries_.size());
    const int nv = ng + static_cast<int>(extras_.size());
    K_ = Eigen::MatrixXd::Zero(R, nv);
    for (int e = 0; e < ng; ++e) {
      K_(entries_[e].row, e) += entries_[e].i == entries_[e].j ? 1.0 : std::sqrt(2.0);
    }
    for (std::size_t k = 0; k < extras_.size(); ++k) {
      for (auto [r, c] : extra_rows[k]) K_(r, ng + static_cast<int>(k)) += c;
    }
    h_ = Eigen::VectorXd::Zero(R);
    for (auto [r, c] : target_rows) h_(r) += c;
    cod_.compute(K_);
  }

  Eigen::VectorXd pack(const std::vector<Eigen::MatrixXd>& G, const Eigen::VectorXd& u) const {
    Eigen::VectorXd x(entries_.size() + u.size());
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      const auto& en = entries_[e];
      x(e) = G[en.block](en.i, en.j) * (en.i == en.j ? 1.0 : std::sqrt(2.0));
    }
    x.tail(u.size()) = u;
    return x;
  }

  std::vector<Eigen::MatrixXd> unpack_gram(const Eigen::VectorXd& x) const {
    std::vector<Eigen::MatrixXd> G;
    for (const auto& idx : blocks_) {
      const int s = static_cast<int>(idx.size());
      G.push_back(Eigen::MatrixXd::Zero(s, s));
    }
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      const auto& en = entries_[e];
      double v = en.i == en.j ? x(e) : x(e) / std::sqrt(2.0);
      G[en.block](en.i, en.j) = v;
      G[en.block](en.j, en.i) = v;
    }
    return G;
  }

  Eigen::VectorXd extras_part(const Eigen::VectorXd& x) const {
    return x.tail(static_cast<Eigen::Index>(extras_.size()));
  }

  Eigen::VectorXd project(const Eigen::VectorXd& x) const {
    Eigen::VectorXd delta = cod_.solve(K_ * x - h_);
    return x - delta;
  }

  double residual(const Eigen::VectorXd& x) const {
    return (K_ * x - h_).cwiseAbs().maxCoeff();
  }

  double min_eig(const std::vector<Eigen::MatrixXd>& G) const {
    double lm = std::numeric_limits<double>::infinity();
    for (const auto& g : G) {
      if (g.size() > 0) lm = std::min(lm, lambda_min(g));
    }
    return std::isfinite(lm) ? lm : 0.0;
  }

  Eigen::VectorXd run(Eigen::VectorXd x, double psd_tol, int max_iters) const {
    const double margin = psd_tol;
    x = project(x);
    for (int it = 0; it < max_iters; ++it) {
      auto G = unpack_gram(x);
      bool ok = true;
      for (auto& g : G) {
        if (g.size() == 0) continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
        if (es.eigenvalues()(0) >= -0.5 * psd_tol) continue;
        ok = false;
        Eigen::VectorXd lam = es.eigenvalues().cwiseMax(margin);
        g = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
      }
      if (ok) break;
      x = project(pack(G, extras_part(x)));
    }
    return x;
  }

  Eigen::MatrixXd full_gram(const Eigen::VectorXd& x) const {
    auto G = unpack_gram(x);
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(basis_.size(), basis_.size());
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
      const auto& idx = blocks_[bi];
      for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) full(idx[i], idx[j]) = G[bi](i, j);
      }
    }
    return full;
  }

  std::vector<Eigen::MatrixXd> split(const Eigen::MatrixXd& full) const {
    std::vector<Eigen::MatrixXd> G;
    for (const auto& idx : blocks_) {
      const int s = static_cast<int>(idx.size());
      Eigen::MatrixXd g(s, s);
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) g(i, j) = full(idx[i], idx[j]);
      }
      G.push_back(std::move(g));
    }
    return G;
  }

 private:
  struct Entry {
    int block;
    int i;
    int j;
    int row;
  };
  std::vector<Monomial> basis_;
  std::vector<std::vector<int>> blocks_;
  std::vector<Polynomial> extras_;
  std::vector<Entry> entries_;
  Eigen::MatrixXd K_;
  Eigen::VectorXd h_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_;
};

std::vector<std::vector<int>> character_blocks(const MomentRelaxation& relax) {
  std::map<std::uint64_t, std::vector<int>> groups;
  for (int a = 0; a < static_cast<int>(relax.basis.size()); ++a) {
    groups[relax.character(relax.basis[a])].push_back(a);
  }
  std::vector<std::vector<int>> out;
  for (auto& [ch, idx] : groups) out.push_back(std::move(idx));
  return out;
}

SosCertificate certificate_from_linear(const MomentRelaxation& relax) {
  const auto& lr = *relax.linear_refutation;
  SosCertificate cert;
  cert.num_vars = relax.num_vars;
  cert.degree = relax.degree;
  cert.basis = relax.basis.monomials();
  cert.gram = Eigen::MatrixXd::Zero(relax.basis.size(), relax.basis.size());
  cert.multipliers.assign(relax.system.equalities.size(), Polynomial(relax.num_vars));
  for (std::size_t r = 0; r < lr.weight.size(); ++r) {
    cert.multipliers[lr.equality[r]].add_term(lr.multiplier[r], lr.weight[r]);
  }
  return cert;
}

// -1 = z^T (-Z) z + sum_r ray_r q_r P_r with Z = sum_k ray_k A_k on the
// leading block, since consistency rows contribute the zero polynomial.
SosCertificate certificate_from_ray(const MomentRelaxation& relax, const Eigen::VectorXd& ray,
                                    const SosOptions& opts) {
  const int B = static_cast<int>(relax.basis.size());
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(B, B);
  for (std::size_t k = 0; k < relax.sdp.constraints.size(); ++k) {
    if (ray(k) == 0.0) continue;
    for (const auto& e : relax.sdp.constraints[k].matrix.entries()) {
      if (e.row >= B || e.col >= B) continue;
      Z(e.row, e.col) += ray(k) * e.value;
      if (e.row != e.col) Z(e.col, e.row) += ray(k) * e.value;
    }
  }
  std::vector<Polynomial> extras;
  Eigen::VectorXd u(relax.sat_rows.size());
  for (std::size_t r = 0; r < relax.sat_rows.size(); ++r) {
    const auto& sr = relax.sat_rows[r];
    extras.push_back(Polynomial::monomial(relax.num_vars, sr.multiplier) *
                     relax.system.equalities[sr.equality]);
    u(r) = ray(sr.constraint);
  }
  GramPolisher pol(relax.num_vars, relax.basis.monomials(), character_blocks(relax), extras,
                   Polynomial::constant(relax.num_vars, -1.0));
  Eigen::VectorXd x = pol.pack(pol.split(-Z), u);
  x = pol.run(x, opts.psd_tol, 5000);

  SosCertificate cert;
  cert.num_vars = relax.num_vars;
  cert.degree = relax.degree;
  cert.basis = relax.basis.monomials();
  cert.gram = pol.full_gram(x);
  cert.multipliers.assign(relax.system.equalities.size(), Polynomial(relax.num_vars));
  Eigen::VectorXd uu = pol.extras_part(x);
  for (std::size_t r = 0; r < relax.sat_rows.size(); ++r) {
    const auto& sr = relax.sat_rows[r];
    cert.multipliers[sr.equality].add_term(sr.multiplier, uu(r));
  }
  return cert;
}

DualityOutcome resolve(const PolynomialSystem& system, int degree, const SosOptions& opts,
                       bool want_pseudoexpectation) {
  system.validate();
  if (!system.inequalities.empty()) {
    throw InvalidArgument("refutation certificates cover equality systems only");
  }
  PolynomialSystem feas = system;
  feas.objective = Polynomial(system.num_vars);
  BoundedSystem bounded = ensure_bounded(feas, opts);
  MomentRelaxation relax = build_relaxation(bounded.system, degree, {opts.exploit_symmetry});

  DualityOutcome out;
  auto finish_cert = [&](SosCertificate cert) {
    if (bounded.ball_added) cert.ball_radius_sq = opts.ball_radius_sq;
    out.certificate_report = verify_certificate(system, cert, opts.id_tol, opts.psd_tol);
    if (!out.certificate_report.passed) {
      throw AmbiguousError("refutation candidate fails verification: " +
                           out.certificate_report.violations.front());
    }
    out.certificate = std::move(cert);
    return out;
  };

  if (relax.linear_refutation) return finish_cert(certificate_from_linear(relax));

  SdpSolution sol = solve(relax.sdp, opts.sdp);
  if (sol.status == SdpStatus::optimal) {
    if (!want_pseudoexpectation) {
      throw NoCertificateError("a degree-" + std::to_string(degree) +
                               " pseudoexpectation satisfies the system");
    }
    PseudoExpectation pe = extract_pseudoexpectation(relax, sol, opts);
    if (bounded.ball_added) pe = pe.restrict_vars(system.num_vars);
    out.satisfaction_report = satisfies(pe, system, opts.sdp.eq_tol);
    if (!out.satisfaction_report.passed) {
      throw AmbiguousError("pseudoexpectation misses the constraints by " +
                           std::to_string(out.satisfaction_report.max_residual));
    }
    out.pseudoexpectation = std::move(pe);
    return out;
  }
  Eigen::VectorXd ray;
  if (sol.status == SdpStatus::infeasible) {
    ray = sol.farkas_ray;
  } else {
    double by = 0.0;
    for (std::size_t k = 0; k < relax.sdp.constraints.size(); ++k) {
      by += relax.sdp.constraints[k].rhs * sol.dual_multipliers(k);
    }
    if (!(by > 0.0)) throw AmbiguousError("solver reached its iteration limit undecided");
    ray = sol.dual_multipliers / by;
  }
  return finish_cert(certificate_from_ray(relax, ray, opts));
}

}  // namespace

SosCertificate extract_certificate(const PolynomialSystem& system, int degree,
                                   const SosOptions& opts) {
  return *resolve(system, degree, opts, false).certificate;
}

DualityOutcome resolve_duality(const PolynomialSystem& system, int degree, const SosOptions& opts) {
  return resolve(system, degree, opts, true);
}

// ---------------------------------------------------------------------------

PolynomialSystem hypercube_system(const Polynomial& p0) {
  const std::size_t n = p0.num_vars();
  PolynomialSystem sys(n);
  sys.equalities.push_back(p0);
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial c = Polynomial::monomial(n, Monomial::variable(static_cast<std::uint32_t>(i), 2));
    c -= Polynomial::constant(n, 1.0);
    sys.equalities.push_back(std::move(c));
  }
  return sys;
}

SosCertificate hypercube_refutation(const Polynomial& p0) {
  const std::size_t n = p0.num_vars();
  if (n > kMaxHypercubeVars) {
    throw DimensionError("hypercube refutation limited to " + std::to_string(kMaxHypercubeVars) +
                         " variables");
  }
  const std::uint64_t size = std::uint64_t{1} << n;
  std::vector<double> values(size);
  double min_abs = std::numeric_limits<double>::infinity();
  const double zero_tol = 1e-12 * std::max(1.0, p0.max_abs_coefficient());
  for (std::uint64_t k = 0; k < size; ++k) {
    auto x = hypercube_point(n, k);
    values[k] = p0.evaluate(x);
    if (std::abs(values[k]) <= zero_tol) {
      std::vector<int> witness(n);
      for (std::size_t i = 0; i < n; ++i) witness[i] = static_cast<int>(x[i]);
      throw SatisfiableError("P0 vanishes at a hypercube point", witness);
    }
    min_abs = std::min(min_abs, std::abs(values[k]));
  }
  // Scale so that (c P0)^2 >= 1 on the cube.
  const double c = min_abs < 1.0 ? 1.0 / min_abs : 1.0;
  std::vector<double> root(size);
  for (std::uint64_t k = 0; k < size; ++k) {
    double v = c * values[k];
    root[k] = std::sqrt(std::max(0.0, v * v - 1.0));
  }
  Polynomial R = interpolate_multilinear(n, root);
  Polynomial P = p0 * c;
  Polynomial rest = P * P - Polynomial::constant(n, 1.0) - R * R;
  HypercubeReduction red = reduce_hypercube(rest);

  SosCertificate cert;
  cert.num_vars = n;
  for (const auto& [m, coef] : R.terms()) cert.basis.push_back(m);
  Eigen::VectorXd r(cert.basis.size());
  for (std::size_t i = 0; i < cert.basis.size(); ++i) r(i) = R.coefficient(cert.basis[i]);
  cert.gram = r * r.transpose();
  cert.multipliers.push_back(p0 * (-c * c));
  int degree = std::max(2 * R.degree(), 2 * p0.degree());
  for (auto& q : red.quotients) {
    if (!q.is_zero()) degree = std::max(degree, q.degree() + 2);
    cert.multipliers.push_back(std::move(q));
  }
  cert.degree = degree + (degree % 2);
  return cert;
}

// ---------------------------------------------------------------------------

namespace {

// SDP over the Gram matrix (plus an optional scalar slot at index B) whose
// constraints match the coefficients of z^T G z - t * n_form to `rhs`.
SdpProblem gram_problem(const std::vector<Monomial>& basis, const Polynomial& rhs,
                        const Polynomial* n_form, std::vector<Monomial>& unmatched) {
  const int B = static_cast<int>(basis.size());
  std::map<Monomial, std::vector<std::pair<int, int>>, GradedLex> cls;
  for (int a = 0; a < B; ++a) {
    for (int b = a; b < B; ++b) cls[basis[a] * basis[b]].emplace_back(a, b);
  }
  for (const auto& [m, c] : rhs.terms()) {
    if (!cls.count(m)) unmatched.push_back(m);
  }
  if (n_form) {
    for (const auto& [m, c] : n_form->terms()) {
      if (!cls.count(m)) unmatched.push_back(m);
    }
  }
  SdpProblem prob;
  prob.matrix_dim = B + (n_form ? 1 : 0);
  for (const auto& [m, entries] : cls) {
    SdpConstraint c;
    for (auto [a, b] : entries) c.matrix.add(a, b, a == b ? 1.0 : 0.5);
    if (n_form) {
      double nv = n_form->coefficient(m);
      if (nv != 0.0) c.matrix.add(B, B, -nv);
    }
    c.rhs = rhs.coefficient(m);
    c.label = "coefficient " + m.to_string();
    prob.constraints.push_back(std::move(c));
  }
  return prob;
}

std::vector<Monomial> newton_basis(const Polynomial& p) {
  int lo = std::numeric_limits<int>::max(), hi = 0;
  for (const auto& [m, c] : p.terms()) {
    lo = std::min(lo, m.degree());
    hi = std::max(hi, m.degree());
  }
  std::vector<Monomial> basis;
  for (int d = (lo + 1) / 2; d <= hi / 2; ++d) {
    auto part = monomials_of_degree(p.num_vars(), d);
    basis.insert(basis.end(), part.begin(), part.end());
  }
  return basis;
}

}  // namespace

std::optional<GramDecomposition> find_sos_decomposition(const Polynomial& p,
                                                        const SosOptions& opts) {
  GramDecomposition out;
  if (p.is_zero()) {
    out.report.passed = true;
    return out;
  }
  if (p.degree() % 2 != 0) return std::nullopt;
  out.basis = newton_basis(p);
  if (out.basis.empty() || static_cast<int>(out.basis.size()) > kMaxSdpDim) return std::nullopt;
  std::vector<Monomial> unmatched;
  SdpProblem prob = gram_problem(out.basis, p, nullptr, unmatched);
  if (!unmatched.empty()) return std::nullopt;
  SdpSolution sol = solve(prob, opts.sdp);
  if (sol.status == SdpStatus::infeasible) return std::nullopt;

  std::vector<int> all(out.basis.size());
  std::iota(all.begin(), all.end(), 0);
  GramPolisher pol(p.num_vars(), out.basis, {all}, {}, p);
  Eigen::VectorXd x = pol.pack({sol.primal_matrix}, Eigen::VectorXd());
  x = pol.run(x, opts.psd_tol, 5000);
  out.gram = pol.full_gram(x);
  out.report = verify_sos_identity(p, out.basis, out.gram, opts.id_tol, opts.psd_tol);
  if (!out.report.passed) return std::nullopt;
  return out;
}

BoundCertificate minimize_sos_bound(const Polynomial& q, const Polynomial& n_form,
                                    const std::vector<Monomial>& basis,
                                    const Eigen::MatrixXd& n_gram, const SosOptions& opts) {
  const int B = static_cast<int>(basis.size());
  if (n_gram.rows() != B || n_gram.cols() != B) throw DimensionError("n_gram does not match basis");
  if (q.num_vars() != n_form.num_vars()) throw DimensionError("q and n_form differ in variables");
  IdentityReport ng = verify_sos_identity(n_form, basis, n_gram, 1e-12, 0.0);
  const double n_floor = ng.lambda_min;
  if (ng.identity_residual > 1e-12 || !(n_floor > 0.0)) {
    throw InvalidArgument("n_gram must be a positive definite Gram matrix of n_form");
  }
  std::vector<Monomial> unmatched;
  SdpProblem prob = gram_problem(basis, -q, &n_form, unmatched);
  if (!unmatched.empty()) {
    throw InvalidArgument("monomial " + unmatched.front().to_string() + " not representable");
  }
  prob.objective.add(B, B, 1.0);
  SdpSolution sol = solve(prob, opts.sdp);
  if (sol.status != SdpStatus::optimal) {
    throw SdpError(std::string("bound SDP ended with status ") + to_string(sol.status));
  }
  double t = sol.primal_matrix(B, B);

  // Exact identity at this t, then lift G along n_gram until it is PSD.
  std::vector<int> all(B);
  std::iota(all.begin(), all.end(), 0);
  Polynomial target = n_form * t - q;
  GramPolisher pol(q.num_vars(), basis, {all}, {}, target);
  Eigen::MatrixXd G0 = sol.primal_matrix.topLeftCorner(B, B);
  Eigen::MatrixXd G = pol.full_gram(pol.project(pol.pack({G0}, Eigen::VectorXd())));
  double lm = lambda_min(G);
  if (lm < 0.0) {
    double delta = -lm / n_floor * (1.0 + 1e-9) + 1e-14;
    t += delta;
    G += delta * n_gram;
  }
  BoundCertificate out;
  out.bound = t;
  out.basis = basis;
  out.gram = G;
  out.target = n_form * t - q;
  out.report = verify_sos_identity(out.target, basis, G, opts.id_tol, opts.psd_tol);
  return out;
}

}  // namespace sos
