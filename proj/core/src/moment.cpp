#include "sos/moment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "sos/certificate.hpp"
#include "sos/errors.hpp"

namespace sos {

namespace {

void monomials_rec(std::size_t var, std::size_t n, int remaining, std::vector<int>& exps,
                   std::vector<Monomial>& out) {
  if (var + 1 == n) {
    exps[var] = remaining;
    out.push_back(Monomial::from_exponents(exps));
    exps[var] = 0;
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    exps[var] = e;
    monomials_rec(var + 1, n, remaining - e, exps, out);
  }
  exps[var] = 0;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::uint64_t parity_mask(const Monomial& m) {
  std::uint64_t mask = 0;
  for (const auto& [v, p] : m.factors()) {
    if (p % 2 == 1) mask |= std::uint64_t{1} << v;
  }
  return mask;
}

// Basis of the GF(2) null space of the exponent-parity rows: sign flips of
// the variable sets in the result leave every row's monomial invariant.
std::vector<std::uint64_t> parity_null_space(const std::vector<std::uint64_t>& rows, std::size_t n) {
  std::vector<std::pair<int, std::uint64_t>> pivots;
  for (std::uint64_t r : rows) {
    for (const auto& [c, p] : pivots) {
      if ((r >> c) & 1U) r ^= p;
    }
    if (r == 0) continue;
    int c = std::countr_zero(r);
    for (auto& [pc, p] : pivots) {
      if ((p >> c) & 1U) p ^= r;
    }
    pivots.emplace_back(c, r);
  }
  std::uint64_t pivot_cols = 0;
  for (const auto& [c, p] : pivots) pivot_cols |= std::uint64_t{1} << c;
  std::vector<std::uint64_t> basis;
  for (std::size_t f = 0; f < n; ++f) {
    if ((pivot_cols >> f) & 1U) continue;
    std::uint64_t s = std::uint64_t{1} << f;
    for (const auto& [c, p] : pivots) {
      if ((p >> f) & 1U) s |= std::uint64_t{1} << c;
    }
    basis.push_back(s);
  }
  return basis;
}

std::uint64_t character_of(const Monomial& m, const std::vector<std::uint64_t>& gens) {
  std::uint64_t par = parity_mask(m);
  std::uint64_t ch = 0;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    if (std::popcount(par & gens[k]) % 2 == 1) ch |= std::uint64_t{1} << k;
  }
  return ch;
}

void add_moment_term(SymSparse& s, const std::pair<int, int>& e, double c) {
  s.add(e.first, e.second, e.first == e.second ? c : 0.5 * c);
}

// Poly in kept-moment coordinates; every monomial must be kept.
void poly_to_row(const MomentRelaxation& r, const Polynomial& p, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) {
  row.setZero();
  for (const auto& [m, c] : p.terms()) {
    auto it = r.moment_index.find(m);
    if (it == r.moment_index.end()) {
      throw DegreeError("monomial " + m.to_string() + " outside the relaxation");
    }
    row(it->second) += c;
  }
}

}  // namespace

std::vector<Monomial> monomials_of_degree(std::size_t num_vars, int degree) {
  std::vector<Monomial> out;
  if (degree < 0) return out;
  if (num_vars == 0) {
    if (degree == 0) out.emplace_back();
    return out;
  }
  std::vector<int> exps(num_vars, 0);
  monomials_rec(0, num_vars, degree, exps, out);
  return out;
}

std::vector<Monomial> monomials_up_to(std::size_t num_vars, int max_degree) {
  std::vector<Monomial> out;
  for (int d = 0; d <= max_degree; ++d) {
    auto part = monomials_of_degree(num_vars, d);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

MonomialBasis::MonomialBasis(std::size_t num_vars, int max_degree)
    : MonomialBasis(monomials_up_to(num_vars, max_degree)) {}

MonomialBasis::MonomialBasis(std::vector<Monomial> monomials) : monomials_(std::move(monomials)) {
  index_.reserve(monomials_.size());
  for (std::size_t i = 0; i < monomials_.size(); ++i) {
    index_.emplace(monomials_[i], static_cast<int>(i));
  }
}

int MonomialBasis::index_of(const Monomial& m) const {
  auto it = index_.find(m);
  return it == index_.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------

void PolynomialSystem::validate() const {
  auto check = [&](const Polynomial& p, const std::string& what) {
    if (p.num_vars() != num_vars) {
      throw DimensionError(what + " has " + std::to_string(p.num_vars()) +
                           " variables, system has " + std::to_string(num_vars));
    }
  };
  check(objective, "objective");
  for (std::size_t i = 0; i < equalities.size(); ++i) {
    check(equalities[i], "equality " + std::to_string(i));
  }
  for (std::size_t i = 0; i < inequalities.size(); ++i) {
    check(inequalities[i], "inequality " + std::to_string(i));
  }
  if (bounded_witness) {
    if (bounded_witness->multipliers.size() != equalities.size()) {
      throw InvalidArgument("boundedness witness needs one multiplier per equality");
    }
    for (const auto& q : bounded_witness->multipliers) check(q, "boundedness multiplier");
  }
}

int PolynomialSystem::max_constraint_degree() const {
  int d = 0;
  for (const auto& p : equalities) d = std::max(d, p.degree());
  for (const auto& p : inequalities) d = std::max(d, p.degree());
  return d;
}

// ---------------------------------------------------------------------------

PseudoExpectation::PseudoExpectation(std::size_t num_vars, int degree, MomentMap moments)
    : num_vars_(num_vars), degree_(degree), moments_(std::move(moments)) {
  if (degree < 0 || degree % 2 != 0) throw DegreeError("pseudoexpectation degree must be even");
  for (const auto& [m, v] : moments_) {
    if (m.var_bound() > num_vars_) throw DimensionError("moment monomial exceeds num_vars");
    if (m.degree() > degree_) {
      throw DegreeError("moment " + m.to_string() + " exceeds degree " + std::to_string(degree_));
    }
    if (!std::isfinite(v)) throw InvalidPseudoExpectation("non-finite moment");
  }
}

PseudoExpectation PseudoExpectation::point_mass(std::span<const double> point, int degree) {
  std::vector<std::vector<double>> pts{std::vector<double>(point.begin(), point.end())};
  std::vector<double> w{1.0};
  return mixture(pts, w, degree);
}

PseudoExpectation PseudoExpectation::mixture(const std::vector<std::vector<double>>& points,
                                             std::span<const double> weights, int degree) {
  if (points.empty() || points.size() != weights.size()) {
    throw InvalidArgument("mixture needs one weight per point");
  }
  const std::size_t n = points.front().size();
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw InvalidArgument("mixture weights must be nonnegative");
    total += w;
  }
  if (total <= 0.0) throw InvalidArgument("mixture weights sum to zero");
  MomentMap mom;
  for (const auto& m : monomials_up_to(n, degree)) {
    double v = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
      if (points[k].size() != n) throw DimensionError("mixture points differ in length");
      v += weights[k] * m.evaluate(points[k]);
    }
    mom.emplace(m, v / total);
  }
  return PseudoExpectation(n, degree, std::move(mom));
}

double PseudoExpectation::moment(const Monomial& m) const {
  if (m.degree() > degree_) {
    throw DegreeError("monomial " + m.to_string() + " exceeds pseudoexpectation degree " +
                      std::to_string(degree_));
  }
  if (m.var_bound() > num_vars_) throw DimensionError("monomial exceeds num_vars");
  auto it = moments_.find(m);
  return it == moments_.end() ? 0.0 : it->second;
}

double PseudoExpectation::apply(const Polynomial& p) const {
  if (p.num_vars() > num_vars_) {
    for (const auto& [m, c] : p.terms()) {
      if (m.var_bound() > num_vars_) throw DimensionError("polynomial exceeds num_vars");
    }
  }
  double s = 0.0;
  for (const auto& [m, c] : p.terms()) s += c * moment(m);
  return s;
}

Eigen::MatrixXd PseudoExpectation::moment_matrix() const {
  MonomialBasis b = matrix_basis();
  const int s = static_cast<int>(b.size());
  Eigen::MatrixXd M(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = i; j < s; ++j) {
      double v = moment(b[i] * b[j]);
      M(i, j) = v;
      M(j, i) = v;
    }
  }
  return M;
}

Eigen::VectorXd PseudoExpectation::mean() const {
  if (degree_ < 2 && num_vars_ > 0) throw DegreeError("mean needs degree >= 2");
  Eigen::VectorXd v(num_vars_);
  for (std::size_t i = 0; i < num_vars_; ++i) {
    v(i) = moment(Monomial::variable(static_cast<std::uint32_t>(i)));
  }
  return v;
}

Eigen::MatrixXd PseudoExpectation::second_moments() const {
  if (degree_ < 2) throw DegreeError("second moments need degree >= 2");
  const auto n = static_cast<int>(num_vars_);
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double v = moment(Monomial::variable(i) * Monomial::variable(j));
      M(i, j) = v;
      M(j, i) = v;
    }
  }
  return M;
}

double PseudoExpectation::normalization_error() const { return std::abs(moment(Monomial()) - 1.0); }

double PseudoExpectation::min_eigenvalue() const { return lambda_min(moment_matrix()); }

void PseudoExpectation::check_invariants(double psd_tol, double norm_tol) const {
  double ne = normalization_error();
  if (ne > norm_tol) {
    throw InvalidPseudoExpectation("normalization L(1) off by " + std::to_string(ne));
  }
  double lm = min_eigenvalue();
  if (lm < -psd_tol) {
    throw InvalidPseudoExpectation("moment matrix has eigenvalue " + std::to_string(lm));
  }
}

PseudoExpectation PseudoExpectation::restrict_vars(std::size_t num_vars) const {
  MomentMap mom;
  for (const auto& [m, v] : moments_) {
    if (m.var_bound() <= num_vars) mom.emplace(m, v);
  }
  return PseudoExpectation(num_vars, degree_, std::move(mom));
}

// ---------------------------------------------------------------------------

std::uint64_t MomentRelaxation::character(const Monomial& m) const {
  return character_of(m, symmetry_generators);
}

MomentRelaxation build_relaxation(const PolynomialSystem& system, int degree,
                                  const RelaxationOptions& opts) {
  system.validate();
  if (degree < 0 || degree % 2 != 0) throw DegreeError("relaxation degree must be even");
  if (degree > kMaxRelaxationDegree) {
    throw DegreeError("relaxation degree " + std::to_string(degree) + " exceeds limit " +
                      std::to_string(kMaxRelaxationDegree));
  }
  for (std::size_t i = 0; i < system.equalities.size(); ++i) {
    if (system.equalities[i].degree() > degree) {
      throw DegreeError("equality " + std::to_string(i) + " has degree " +
                        std::to_string(system.equalities[i].degree()) + " > " +
                        std::to_string(degree));
    }
  }
  for (std::size_t i = 0; i < system.inequalities.size(); ++i) {
    if (system.inequalities[i].degree() > degree) {
      throw DegreeError("inequality " + std::to_string(i) + " exceeds the relaxation degree");
    }
  }
  if (system.objective.degree() > degree) {
    throw DegreeError("objective degree " + std::to_string(system.objective.degree()) +
                      " exceeds relaxation degree " + std::to_string(degree));
  }

  const std::size_t n = system.num_vars;
  const int half = degree / 2;
  if (binomial(static_cast<int>(n) + half, half) > kMaxSdpDim) {
    throw DimensionError("moment matrix would exceed " + std::to_string(kMaxSdpDim) + " rows");
  }

  MomentRelaxation r;
  r.system = system;
  r.num_vars = n;
  r.degree = degree;
  r.basis = MonomialBasis(n, half);

  if (opts.exploit_symmetry && n <= 64) {
    std::vector<std::uint64_t> rows;
    auto collect = [&](const Polynomial& p) {
      for (const auto& [m, c] : p.terms()) rows.push_back(parity_mask(m));
    };
    collect(system.objective);
    for (const auto& p : system.equalities) collect(p);
    for (const auto& p : system.inequalities) collect(p);
    r.symmetry_generators = parity_null_space(rows, n);
  }

  for (const auto& m : monomials_up_to(n, degree)) {
    if (r.character(m) != 0) continue;
    r.moment_index.emplace(m, static_cast<int>(r.moments.size()));
    r.moments.push_back(m);
  }
  r.classes.resize(r.moments.size());

  const int B = static_cast<int>(r.basis.size());
  std::vector<std::uint64_t> basis_char(B);
  for (int a = 0; a < B; ++a) basis_char[a] = r.character(r.basis[a]);
  for (int a = 0; a < B; ++a) {
    for (int b = a; b < B; ++b) {
      if (basis_char[a] != basis_char[b]) continue;
      int k = r.moment_index.at(r.basis[a] * r.basis[b]);
      r.classes[k].emplace_back(a, b);
    }
  }

  auto& sdp = r.sdp;
  sdp.matrix_dim = B;
  {
    SdpConstraint c;
    c.matrix.add(0, 0, 1.0);
    c.rhs = 1.0;
    c.label = "normalization";
    sdp.constraints.push_back(std::move(c));
    r.normalization_row = 0;
  }
  // Chained rows keep A A^T tridiagonal within a class; tying every entry to
  // cls[0] would make each class a dense clique and slow the factorization.
  for (std::size_t k = 0; k < r.moments.size(); ++k) {
    const auto& cls = r.classes[k];
    for (std::size_t e = 1; e < cls.size(); ++e) {
      SdpConstraint c;
      add_moment_term(c.matrix, cls[e], 1.0);
      add_moment_term(c.matrix, cls[e - 1], -1.0);
      c.label = "consistency " + r.moments[k].to_string();
      sdp.constraints.push_back(std::move(c));
    }
  }

  // Candidate satisfaction rows q * P_i with char(q) = 0.
  struct Candidate {
    int equality;
    Monomial q;
    Polynomial row;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < system.equalities.size(); ++i) {
    const auto& p = system.equalities[i];
    if (p.is_zero()) continue;
    for (const auto& q : monomials_up_to(n, degree - p.degree())) {
      if (r.character(q) != 0) continue;
      cands.push_back({static_cast<int>(i), q, Polynomial::monomial(n, q) * p});
    }
  }

  std::vector<int> keep;
  const int K = static_cast<int>(r.moments.size());
  const int nc = static_cast<int>(cands.size());
  std::size_t nonzero_eqs = 0;
  int single_degree = 0;
  for (const auto& p : system.equalities) {
    if (!p.is_zero()) {
      ++nonzero_eqs;
      single_degree = p.degree();
    }
  }
  if (nc > 0 && nonzero_eqs == 1 && single_degree >= 1) {
    // (sum_q w_q q) P = 0 forces w = 0, and 1 is not a multiple of P.
    keep.resize(nc);
    std::iota(keep.begin(), keep.end(), 0);
  } else if (nc > 0) {
    Eigen::MatrixXd F(nc + 1, K);
    Eigen::VectorXd scale(nc + 1);
    F.setZero();
    F(0, r.moment_index.at(Monomial())) = 1.0;
    scale(0) = 1.0;
    for (int j = 0; j < nc; ++j) {
      poly_to_row(r, cands[j].row, F.row(j + 1));
      scale(j + 1) = F.row(j + 1).norm();
      F.row(j + 1) /= scale(j + 1);
    }
    Eigen::VectorXd g = Eigen::VectorXd::Zero(nc + 1);
    g(0) = 1.0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(F);
    qr.setThreshold(1e-10);
    Eigen::VectorXd yls = qr.solve(g);
    Eigen::VectorXd res = g - F * yls;
    if (res.norm() > 1e-8 && std::abs(res(0)) > 1e-12) {
      // res is orthogonal to the row combinations: res_0 * 1 +
      // sum_j res_j R_j / scale_j = 0.
      MomentRelaxation::LinearRefutation lr;
      for (int j = 0; j < nc; ++j) {
        double w = res(j + 1) / (scale(j + 1) * res(0));
        if (w == 0.0) continue;
        lr.equality.push_back(cands[j].equality);
        lr.multiplier.push_back(cands[j].q);
        lr.weight.push_back(w);
      }
      r.linear_refutation = std::move(lr);
    }
    Eigen::MatrixXd Ft = F.bottomRows(nc).transpose();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qrt(Ft);
    qrt.setThreshold(1e-6);
    const int rank = static_cast<int>(qrt.rank());
    for (int t = 0; t < rank; ++t) keep.push_back(qrt.colsPermutation().indices()(t));
    std::sort(keep.begin(), keep.end());
  }

  for (int j : keep) {
    SdpConstraint c;
    for (const auto& [m, coef] : cands[j].row.terms()) {
      add_moment_term(c.matrix, r.classes[r.moment_index.at(m)][0], coef);
    }
    c.label = "equality " + std::to_string(cands[j].equality) + " * " + cands[j].q.to_string();
    r.sat_rows.push_back({static_cast<int>(sdp.constraints.size()), cands[j].equality, cands[j].q});
    sdp.constraints.push_back(std::move(c));
  }

  for (std::size_t gi = 0; gi < system.inequalities.size(); ++gi) {
    const auto& g = system.inequalities[gi];
    int ld = (degree - g.degree()) / 2;
    MomentRelaxation::LocalizingBlock blk{static_cast<int>(gi), sdp.matrix_dim,
                                          MonomialBasis(n, ld)};
    const int s = static_cast<int>(blk.basis.size());
    for (int a = 0; a < s; ++a) {
      for (int b = a; b < s; ++b) {
        if (r.character(blk.basis[a]) != r.character(blk.basis[b])) continue;
        SdpConstraint c;
        add_moment_term(c.matrix, {blk.offset + a, blk.offset + b}, 1.0);
        Monomial ab = blk.basis[a] * blk.basis[b];
        for (const auto& [m, coef] : g.terms()) {
          add_moment_term(c.matrix, r.classes[r.moment_index.at(m * ab)][0], -coef);
        }
        c.label = "localizing " + std::to_string(gi) + " " + ab.to_string();
        sdp.constraints.push_back(std::move(c));
      }
    }
    sdp.matrix_dim += s;
    r.localizing.push_back(std::move(blk));
  }
  if (sdp.matrix_dim > kMaxSdpDim) {
    throw DimensionError("relaxation needs a " + std::to_string(sdp.matrix_dim) +
                         "-dimensional PSD variable");
  }

  for (const auto& [m, coef] : system.objective.terms()) {
    auto it = r.moment_index.find(m);
    if (it == r.moment_index.end()) continue;  // odd under a symmetry: impossible
    add_moment_term(sdp.objective, r.classes[it->second][0], coef);
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

// Alternating projection between the PSD cone (per symmetry block) and the
// affine set {normalization, kept satisfaction rows} in moment coordinates,
// ending on the affine side so the linear constraints hold exactly.
class MomentRepair {
 public:
  explicit MomentRepair(const MomentRelaxation& r) : r_(r) {
    const int K = static_cast<int>(r.moments.size());
    w_.resize(K);
    for (int k = 0; k < K; ++k) {
      double w = 0.0;
      for (const auto& [a, b] : r.classes[k]) w += (a == b) ? 1.0 : 2.0;
      w_(k) = w;
    }
    const int rows = 1 + static_cast<int>(r.sat_rows.size());
    C_ = Eigen::MatrixXd::Zero(rows, K);
    C_(0, r.moment_index.at(Monomial())) = 1.0;
    for (std::size_t j = 0; j < r.sat_rows.size(); ++j) {
      const auto& sr = r.sat_rows[j];
      Polynomial row = Polynomial::monomial(r.num_vars, sr.multiplier) *
                       r.system.equalities[sr.equality];
      poly_to_row(r, row, C_.row(j + 1));
    }
    h_ = Eigen::VectorXd::Zero(rows);
    h_(0) = 1.0;
    Eigen::MatrixXd CW = C_ * w_.cwiseInverse().asDiagonal();
    gram_.compute(CW * C_.transpose());

    std::map<std::uint64_t, std::vector<int>> groups;
    for (int a = 0; a < static_cast<int>(r.basis.size()); ++a) {
      groups[r.character(r.basis[a])].push_back(a);
    }
    for (auto& [ch, idx] : groups) blocks_.push_back(std::move(idx));
    entry_.resize(blocks_.size());
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
      const auto& idx = blocks_[bi];
      const int s = static_cast<int>(idx.size());
      entry_[bi].resize(s * s);
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
          entry_[bi][i * s + j] = r.moment_index.at(r.basis[idx[i]] * r.basis[idx[j]]);
        }
      }
    }
  }

  Eigen::VectorXd project_affine(const Eigen::VectorXd& a) const {
    Eigen::VectorXd lam = gram_.solve(C_ * a - h_);
    return a - w_.cwiseInverse().cwiseProduct(C_.transpose() * lam);
  }

  std::vector<Eigen::MatrixXd> matrices(const Eigen::VectorXd& y) const {
    std::vector<Eigen::MatrixXd> out;
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
      const int s = static_cast<int>(blocks_[bi].size());
      Eigen::MatrixXd M(s, s);
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) M(i, j) = y(entry_[bi][i * s + j]);
      }
      out.push_back(std::move(M));
    }
    return out;
  }

  // Least-squares moment vector of a block matrix family.
  Eigen::VectorXd average(const std::vector<Eigen::MatrixXd>& mats) const {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(w_.size());
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
      const int s = static_cast<int>(blocks_[bi].size());
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) acc(entry_[bi][i * s + j]) += mats[bi](i, j);
      }
    }
    return acc.cwiseQuotient(w_);
  }

  double min_eig(const std::vector<Eigen::MatrixXd>& mats) const {
    double lm = std::numeric_limits<double>::infinity();
    for (const auto& M : mats) lm = std::min(lm, lambda_min(M));
    return mats.empty() ? 0.0 : lm;
  }

  Eigen::VectorXd run(Eigen::VectorXd y, double target, int max_iters) const {
    y = project_affine(y);
    for (int it = 0; it < max_iters; ++it) {
      auto mats = matrices(y);
      bool ok = true;
      for (auto& M : mats) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
        if (es.eigenvalues()(0) >= -target) continue;
        ok = false;
        Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
        M = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
      }
      if (ok) break;
      y = project_affine(average(mats));
    }
    return y;
  }

 private:
  const MomentRelaxation& r_;
  Eigen::VectorXd w_;
  Eigen::MatrixXd C_;
  Eigen::VectorXd h_;
  Eigen::LDLT<Eigen::MatrixXd> gram_;
  std::vector<std::vector<int>> blocks_;
  std::vector<std::vector<int>> entry_;
};

}  // namespace

PseudoExpectation extract_pseudoexpectation(const MomentRelaxation& relax, const SdpSolution& sol,
                                            const SosOptions& opts) {
  const int K = static_cast<int>(relax.moments.size());
  const auto& X = sol.primal_matrix;
  Eigen::VectorXd y(K);
  for (int k = 0; k < K; ++k) {
    double s = 0.0;
    for (const auto& [a, b] : relax.classes[k]) s += X(a, b);
    y(k) = s / static_cast<double>(relax.classes[k].size());
  }
  double y0 = y(relax.moment_index.at(Monomial()));
  if (!(y0 > 0.0)) throw InvalidPseudoExpectation("solver returned L(1) <= 0");
  y /= y0;

  MomentRepair repair(relax);
  y = repair.run(y, 1e-4 * opts.psd_tol, opts.repair_iters);

  PseudoExpectation::MomentMap mom;
  for (int k = 0; k < K; ++k) mom.emplace(relax.moments[k], y(k));
  mom[Monomial()] = 1.0;
  return PseudoExpectation(relax.num_vars, relax.degree, std::move(mom));
}

// ---------------------------------------------------------------------------

bool detect_bounded(const PolynomialSystem& system) {
  const std::size_t n = system.num_vars;
  if (n == 0) return true;
  std::vector<bool> covered(n, false);
  for (const auto& p : system.equalities) {
    if (p.degree() != 2) continue;
    int sign = 0;
    bool ok = true;
    std::vector<bool> squared(n, false);
    for (const auto& [m, c] : p.terms()) {
      if (m.degree() != 2) continue;
      if (m.factors().size() != 1) {
        ok = false;
        break;
      }
      int s = c > 0 ? 1 : -1;
      if (sign != 0 && s != sign) {
        ok = false;
        break;
      }
      sign = s;
      squared[m.factors()[0].first] = true;
    }
    if (!ok) continue;
    for (const auto& [m, c] : p.terms()) {
      if (m.degree() == 1 && !squared[m.factors()[0].first]) ok = false;
    }
    if (!ok) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (squared[i]) covered[i] = true;
    }
  }
  return std::all_of(covered.begin(), covered.end(), [](bool b) { return b; });
}

bool verify_boundedness_witness(const PolynomialSystem& system, const SosOptions& opts) {
  if (!system.bounded_witness) return false;
  system.validate();
  const auto& w = *system.bounded_witness;
  const std::size_t n = system.num_vars;
  Polynomial t = Polynomial::constant(n, w.radius_sq);
  for (std::size_t i = 0; i < n; ++i) {
    t -= Polynomial::monomial(n, Monomial::variable(static_cast<std::uint32_t>(i), 2));
  }
  for (std::size_t i = 0; i < system.equalities.size(); ++i) {
    t -= w.multipliers[i] * system.equalities[i];
  }
  return find_sos_decomposition(t, opts).has_value();
}

PolynomialSystem with_ball(const PolynomialSystem& system, double radius_sq) {
  const std::size_t n = system.num_vars + 1;
  PolynomialSystem out(n);
  out.objective = system.objective.with_num_vars(n);
  for (const auto& p : system.equalities) out.equalities.push_back(p.with_num_vars(n));
  for (const auto& p : system.inequalities) out.inequalities.push_back(p.with_num_vars(n));
  if (!(radius_sq > 0.0)) throw InvalidArgument("ball radius must be positive");
  // The slack is stored as s / sqrt(radius_sq) so every moment stays O(1).
  Polynomial ball = Polynomial::constant(n, -1.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    ball += Polynomial::monomial(n, Monomial::variable(static_cast<std::uint32_t>(i), 2),
                                 1.0 / radius_sq);
  }
  ball += Polynomial::monomial(n, Monomial::variable(static_cast<std::uint32_t>(n - 1), 2));
  out.equalities.push_back(std::move(ball));
  return out;
}

BoundedSystem ensure_bounded(const PolynomialSystem& system, const SosOptions& opts) {
  system.validate();
  if (system.bounded_witness) {
    if (!verify_boundedness_witness(system, opts)) {
      throw InvalidArgument("boundedness witness does not verify");
    }
    return {system, false};
  }
  if (detect_bounded(system)) return {system, false};
  return {with_ball(system, opts.ball_radius_sq), true};
}

EstimateReport sos_estimate(const PolynomialSystem& system, int degree, const SosOptions& opts) {
  EstimateReport rep;
  BoundedSystem bounded = ensure_bounded(system, opts);
  rep.ball_added = bounded.ball_added;
  const PolynomialSystem* target = &bounded.system;

  MomentRelaxation relax = build_relaxation(*target, degree, {opts.exploit_symmetry});
  rep.matrix_dim = relax.sdp.matrix_dim;
  rep.num_constraints = static_cast<int>(relax.sdp.constraints.size());
  if (relax.linear_refutation) {
    throw RefutableError("linear constraints of the degree-" + std::to_string(degree) +
                             " relaxation are inconsistent",
                         degree);
  }
  SdpSolution sol = solve(relax.sdp, opts.sdp);
  rep.status = sol.status;
  rep.iterations = sol.iterations;
  rep.primal_residual = sol.primal_residual;
  rep.gap = sol.gap;
  if (sol.status == SdpStatus::infeasible) {
    throw RefutableError("no degree-" + std::to_string(degree) + " pseudoexpectation exists",
                         degree);
  }
  if (sol.status != SdpStatus::optimal) {
    throw SdpError("solver stopped after " + std::to_string(sol.iterations) +
                   " iterations (residual " + std::to_string(sol.primal_residual) + ")");
  }
  PseudoExpectation pe = extract_pseudoexpectation(relax, sol, opts);
  if (rep.ball_added) pe = pe.restrict_vars(system.num_vars);
  rep.estimate = pe.apply(system.objective);
  rep.witness = std::move(pe);
  return rep;
}

SatisfactionReport satisfies(const PseudoExpectation& pe, const PolynomialSystem& system,
                             double eq_tol) {
  system.validate();
  if (pe.num_vars() != system.num_vars) throw DimensionError("pseudoexpectation dimension mismatch");
  SatisfactionReport rep;
  for (std::size_t i = 0; i < system.equalities.size(); ++i) {
    const auto& p = system.equalities[i];
    if (p.degree() > pe.degree()) {
      throw DegreeError("equality " + std::to_string(i) + " exceeds pseudoexpectation degree");
    }
    for (const auto& q : monomials_up_to(system.num_vars, pe.degree() - p.degree())) {
      double v = 0.0;
      for (const auto& [m, c] : p.terms()) v += c * pe.moment(q * m);
      if (std::abs(v) > rep.max_residual || rep.worst_equality < 0) {
        if (std::abs(v) >= rep.max_residual) {
          rep.max_residual = std::abs(v);
          rep.worst_equality = static_cast<int>(i);
          rep.worst_multiplier = q;
        }
      }
    }
  }
  rep.passed = rep.max_residual <= eq_tol;
  return rep;
}

namespace {

// Alternating projection between the PSD cone and moment-structured
// matrices with L(1) = 1; absorbs roundoff amplified by reweighting.
PseudoExpectation restore_psd(const PseudoExpectation& pe, double psd_tol, int max_iters) {
  MonomialBasis b = pe.matrix_basis();
  const int s = static_cast<int>(b.size());
  std::unordered_map<Monomial, int, MonomialHash> index;
  std::vector<Monomial> mons;
  std::vector<int> entry(static_cast<std::size_t>(s) * s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      Monomial m = b[i] * b[j];
      auto [it, inserted] = index.try_emplace(m, static_cast<int>(mons.size()));
      if (inserted) mons.push_back(m);
      entry[i * s + j] = it->second;
    }
  }
  const int K = static_cast<int>(mons.size());
  Eigen::VectorXd y(K), w = Eigen::VectorXd::Zero(K);
  for (int k = 0; k < K; ++k) y(k) = pe.moment(mons[k]);
  for (int e : entry) w(e) += 1.0;
  const int one = index.at(Monomial());
  for (int it = 0; it < max_iters; ++it) {
    Eigen::MatrixXd M(s, s);
    for (int i = 0; i < s * s; ++i) M(i / s, i % s) = y(entry[i]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    if (es.eigenvalues()(0) >= -0.25 * psd_tol) break;
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    M = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    y.setZero();
    for (int i = 0; i < s * s; ++i) y(entry[i]) += M(i / s, i % s);
    y = y.cwiseQuotient(w);
    y(one) = 1.0;
  }
  PseudoExpectation::MomentMap mom = pe.moments();
  for (int k = 0; k < K; ++k) mom[mons[k]] = y(k);
  return PseudoExpectation(pe.num_vars(), pe.degree(), std::move(mom));
}

}  // namespace

PseudoExpectation reweight(const PseudoExpectation& pe, const Polynomial& w, double floor,
                           double psd_tol) {
  if (w.num_vars() != pe.num_vars()) throw DimensionError("weight polynomial dimension mismatch");
  const int out_degree = pe.degree() - 2 * w.degree();
  if (out_degree < 2) {
    throw DegreeError("reweighting by degree " + std::to_string(w.degree()) +
                      " needs pseudoexpectation degree >= " + std::to_string(2 * w.degree() + 2));
  }
  const Polynomial w2 = w * w;
  const double z = pe.apply(w2);
  if (!(z >= floor)) {
    throw DegenerateWeightError("L(W^2) = " + std::to_string(z) + " below floor " +
                                std::to_string(floor));
  }
  PseudoExpectation::MomentMap mom;
  for (const auto& m : monomials_up_to(pe.num_vars(), out_degree)) {
    double v = 0.0;
    for (const auto& [t, c] : w2.terms()) v += c * pe.moment(t * m);
    mom.emplace(m, v / z);
  }
  mom[Monomial()] = 1.0;
  PseudoExpectation out(pe.num_vars(), out_degree, std::move(mom));
  if (out.min_eigenvalue() < -0.25 * psd_tol) out = restore_psd(out, psd_tol, 1000);
  out.check_invariants(psd_tol);
  return out;
}

}  // namespace sos
