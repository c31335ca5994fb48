#include "sos/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#ifdef SOS_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#endif

#include "sos/errors.hpp"

namespace sos {

void SymSparse::add(int i, int j, double v) {
  if (i > j) std::swap(i, j);
  entries_.push_back({i, j, v});
}

SymSparse SymSparse::from_dense(const Eigen::MatrixXd& m, double sym_tol) {
  if (m.rows() != m.cols()) throw DimensionError("matrix is not square");
  SymSparse s;
  for (int j = 0; j < m.cols(); ++j) {
    for (int i = 0; i <= j; ++i) {
      if (std::abs(m(i, j) - m(j, i)) > sym_tol) {
        throw InvalidArgument("matrix is not symmetric at (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
      }
      double v = 0.5 * (m(i, j) + m(j, i));
      if (v != 0.0) s.add(i, j, v);
    }
  }
  return s;
}

SymSparse SymSparse::canonical() const {
  std::vector<SymEntry> sorted = entries_;
  std::sort(sorted.begin(), sorted.end(), [](const SymEntry& a, const SymEntry& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  SymSparse out;
  for (const auto& e : sorted) {
    if (!out.entries_.empty() && out.entries_.back().row == e.row &&
        out.entries_.back().col == e.col) {
      out.entries_.back().value += e.value;
    } else {
      out.entries_.push_back(e);
    }
  }
  std::erase_if(out.entries_, [](const SymEntry& e) { return e.value == 0.0; });
  return out;
}

Eigen::MatrixXd SymSparse::to_dense(int dim) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& e : entries_) {
    m(e.row, e.col) += e.value;
    if (e.row != e.col) m(e.col, e.row) += e.value;
  }
  return m;
}

double SymSparse::dot(const Eigen::MatrixXd& x) const {
  double s = 0.0;
  for (const auto& e : entries_) {
    s += (e.row == e.col ? 1.0 : 2.0) * e.value * x(e.row, e.col);
  }
  return s;
}

double SymSparse::frobenius_norm() const {
  double s = 0.0;
  for (const auto& e : canonical().entries_) {
    s += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
  }
  return std::sqrt(s);
}

void SdpProblem::validate() const {
  if (matrix_dim <= 0) throw DimensionError("matrix_dim must be positive");
  if (matrix_dim > kMaxSdpDim) {
    throw DimensionError("matrix_dim " + std::to_string(matrix_dim) + " exceeds limit " +
                         std::to_string(kMaxSdpDim));
  }
  auto check = [&](const SymSparse& m, const std::string& what) {
    for (const auto& e : m.entries()) {
      if (e.row < 0 || e.col < 0 || e.row >= matrix_dim || e.col >= matrix_dim) {
        throw DimensionError(what + " has entry (" + std::to_string(e.row) + ", " +
                             std::to_string(e.col) + ") outside dimension " +
                             std::to_string(matrix_dim));
      }
      if (!std::isfinite(e.value)) throw InvalidArgument(what + " has a non-finite entry");
    }
  };
  check(objective, "objective");
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    const auto& c = constraints[k];
    check(c.matrix, "constraint " + std::to_string(k));
    if (!std::isfinite(c.rhs)) {
      throw InvalidArgument("constraint " + std::to_string(k) + " has a non-finite rhs");
    }
  }
}

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::infeasible: return "infeasible";
    case SdpStatus::max_iters: return "max_iters";
  }
  return "unknown";
}

double lambda_min(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double lambda_max(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(m.rows() - 1);
}

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

// Block-diagonal working form of the problem. Every used matrix position
// (i <= j) gets an svec coordinate; off-diagonal coordinates carry a sqrt(2)
// factor so that the svec dot product equals the Frobenius product.
struct Workspace {
  int dim = 0;
  std::vector<int> block_of;
  std::vector<int> local_of;
  std::vector<std::vector<int>> blocks;

  struct Pos {
    int block;
    int i;
    int j;
    bool diag;
  };
  std::vector<Pos> pos;
  std::unordered_map<long long, int> pos_index;

  int position(int i, int j) {
    long long key = static_cast<long long>(i) * dim + j;
    auto [it, inserted] = pos_index.try_emplace(key, static_cast<int>(pos.size()));
    if (inserted) pos.push_back({block_of[i], local_of[i], local_of[j], i == j});
    return it->second;
  }

  double svec_weight(int p) const { return pos[p].diag ? 1.0 : kSqrt2; }

  Eigen::VectorXd gather(const std::vector<Eigen::MatrixXd>& mats) const {
    Eigen::VectorXd v(pos.size());
    for (std::size_t p = 0; p < pos.size(); ++p) {
      const auto& q = pos[p];
      v(p) = mats[q.block](q.i, q.j) * (q.diag ? 1.0 : kSqrt2);
    }
    return v;
  }

  void scatter_add(const Eigen::VectorXd& v, double scale, std::vector<Eigen::MatrixXd>& mats) const {
    for (std::size_t p = 0; p < pos.size(); ++p) {
      const auto& q = pos[p];
      if (q.diag) {
        mats[q.block](q.i, q.i) += scale * v(p);
      } else {
        double w = scale * v(p) / kSqrt2;
        mats[q.block](q.i, q.j) += w;
        mats[q.block](q.j, q.i) += w;
      }
    }
  }

  std::vector<Eigen::MatrixXd> zeros() const {
    std::vector<Eigen::MatrixXd> m;
    m.reserve(blocks.size());
    for (const auto& b : blocks) {
      int s = static_cast<int>(b.size());
      m.push_back(Eigen::MatrixXd::Zero(s, s));
    }
    return m;
  }

  Eigen::MatrixXd assemble(const std::vector<Eigen::MatrixXd>& mats, double scale) const {
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& idx = blocks[b];
      for (std::size_t r = 0; r < idx.size(); ++r) {
        for (std::size_t c = 0; c < idx.size(); ++c) full(idx[r], idx[c]) = scale * mats[b](r, c);
      }
    }
    return full;
  }
};

double block_lambda_max(const std::vector<Eigen::MatrixXd>& mats) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& m : mats) best = std::max(best, lambda_max(m));
  return mats.empty() ? 0.0 : best;
}

// Factorization of the normal matrix A A^T. Rows are linearly dependent
// when the factorization fails or its pivots span more than 13 decades.
#ifdef SOS_HAVE_CHOLMOD
class NormalFactor : public Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<double>> {
 public:
  void compute(const Eigen::SparseMatrix<double>& m) {
    Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<double>>::compute(m);
    if (info() != Eigen::Success) throw SdpError("constraints are linearly dependent");
    // rcond is (min L_ii / max L_ii)^2, the pivot ratio of the LDL^T form.
    if (!(cholmod_rcond(m_cholmodFactor, &cholmod()) > 1e-13)) {
      throw SdpError("constraints are linearly dependent");
    }
  }
};
#else
class NormalFactor : public Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> {
 public:
  void compute(const Eigen::SparseMatrix<double>& m) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>::compute(m);
    if (info() != Eigen::Success) throw SdpError("factorization of A A^T failed");
    const Eigen::VectorXd d = vectorD();
    double dmax = d.size() ? d.cwiseAbs().maxCoeff() : 1.0;
    for (int i = 0; i < d.size(); ++i) {
      if (!(d(i) > 1e-13 * std::max(1.0, dmax))) {
        throw SdpError("constraints are linearly dependent (pivot " + std::to_string(i) + ")");
      }
    }
  }
};
#endif

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SdpOptions& opts) {
  problem.validate();
  const int n = problem.matrix_dim;
  const int m = static_cast<int>(problem.constraints.size());

  SymSparse objective = problem.objective.canonical();
  std::vector<SymSparse> cons;
  cons.reserve(m);
  for (const auto& c : problem.constraints) cons.push_back(c.matrix.canonical());

  // Connected components of the sparsity graph give the PSD blocks; entries
  // outside every block are never referenced and may be taken as zero.
  Workspace ws;
  ws.dim = n;
  {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto unite = [&](const SymSparse& s) {
      for (const auto& e : s.entries()) {
        int a = find_root(parent, e.row), b = find_root(parent, e.col);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    };
    unite(objective);
    for (const auto& c : cons) unite(c);
    ws.block_of.assign(n, -1);
    ws.local_of.assign(n, -1);
    std::vector<int> root_block(n, -1);
    for (int i = 0; i < n; ++i) {
      int r = find_root(parent, i);
      if (root_block[r] < 0) {
        root_block[r] = static_cast<int>(ws.blocks.size());
        ws.blocks.emplace_back();
      }
      int b = root_block[r];
      ws.block_of[i] = b;
      ws.local_of[i] = static_cast<int>(ws.blocks[b].size());
      ws.blocks[b].push_back(i);
    }
  }

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd b(m);
  Eigen::VectorXd row_norm(m);
  std::vector<bool> zero_row(m, false);
  for (int k = 0; k < m; ++k) {
    double norm2 = 0.0;
    for (const auto& e : cons[k].entries()) {
      norm2 += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
    }
    double r = std::sqrt(norm2);
    b(k) = problem.constraints[k].rhs;
    if (r == 0.0) {
      zero_row[k] = true;
      row_norm(k) = 1.0;
      if (b(k) != 0.0) {
        // 0 = b_k with b_k != 0: e_k / b_k is an exact Farkas ray.
        SdpSolution sol;
        sol.status = SdpStatus::infeasible;
        sol.primal_matrix = Eigen::MatrixXd::Zero(n, n);
        sol.dual_multipliers = Eigen::VectorXd::Zero(m);
        sol.dual_slack = Eigen::MatrixXd::Zero(n, n);
        sol.farkas_ray = Eigen::VectorXd::Zero(m);
        sol.farkas_ray(k) = 1.0 / b(k);
        sol.farkas_value = 0.0;
        sol.primal_residual = std::abs(b(k));
        return sol;
      }
      continue;
    }
    row_norm(k) = r;
    for (const auto& e : cons[k].entries()) {
      int p = ws.position(e.row, e.col);
      trips.emplace_back(k, p, e.value * ws.svec_weight(p) / r);
    }
  }
  Eigen::VectorXd c_full;
  {
    std::vector<std::pair<int, double>> cvals;
    for (const auto& e : objective.entries()) {
      int p = ws.position(e.row, e.col);
      cvals.emplace_back(p, e.value * ws.svec_weight(p));
    }
    c_full = Eigen::VectorXd::Zero(ws.pos.size());
    for (auto [p, v] : cvals) c_full(p) += v;
  }
  const int np = static_cast<int>(ws.pos.size());
  Eigen::SparseMatrix<double> A(m, np);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseMatrix<double> At = A.transpose();

  Eigen::VectorXd bn = b.cwiseQuotient(row_norm);
  for (int k = 0; k < m; ++k) {
    if (zero_row[k]) bn(k) = 0.0;
  }
  const double beta = std::max(1.0, bn.norm());
  const double gamma = std::max(1.0, c_full.norm());
  const Eigen::VectorXd bs = bn / beta;
  const Eigen::VectorXd cs = c_full / gamma;

  Eigen::SparseMatrix<double> AAt = A * At;
  for (int k = 0; k < m; ++k) {
    if (zero_row[k]) AAt.coeffRef(k, k) = 1.0;
  }
  NormalFactor ldlt;
  if (m > 0) ldlt.compute(AAt);

  auto X = ws.zeros();
  auto S = ws.zeros();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  double mu = opts.mu_init;
  const double cnorm = cs.norm();
  const double eq_target = 0.5 * opts.eq_tol;

  SdpSolution sol;
  Eigen::VectorXd y_check = y;
  int last_check = 0;

  auto try_farkas = [&](const Eigen::VectorXd& dir) -> bool {
    double bd = bs.dot(dir);
    if (!(bd > 0.0)) return false;
    Eigen::VectorXd ray = dir / bd;
    auto M = ws.zeros();
    ws.scatter_add(At * ray, 1.0, M);
    double lmax = block_lambda_max(M) / beta;
    if (lmax > opts.infeas_tol) return false;
    sol.status = SdpStatus::infeasible;
    Eigen::VectorXd ray_orig = ray.cwiseQuotient(row_norm) / beta;
    for (int k = 0; k < m; ++k) {
      if (zero_row[k]) ray_orig(k) = 0.0;
    }
    sol.farkas_ray = ray_orig;
    sol.farkas_value = lmax;
    return true;
  };

  int it = 0;
  bool done = false;
  for (; it < opts.max_iters && !done; ++it) {
    Eigen::VectorXd xs = ws.gather(X);
    Eigen::VectorXd ss = ws.gather(S);
    Eigen::VectorXd rhs = mu * (bs - A * xs) + A * (cs - ss);
    for (int k = 0; k < m; ++k) {
      if (zero_row[k]) rhs(k) = 0.0;
    }
    if (m > 0) y = ldlt.solve(rhs);

    // V = C - A^T y - mu X, S = V_+, X = -V_- / mu.
    auto V = X;
    for (auto& blk : V) blk *= -mu;
    ws.scatter_add(cs - At * y, 1.0, V);
    double dres2 = 0.0;
    for (std::size_t bi = 0; bi < V.size(); ++bi) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V[bi]);
      const auto& lam = es.eigenvalues();
      const auto& Q = es.eigenvectors();
      int neg = 0;
      while (neg < lam.size() && lam(neg) < 0.0) ++neg;
      Eigen::MatrixXd Xn;
      if (neg == 0) {
        Xn = Eigen::MatrixXd::Zero(V[bi].rows(), V[bi].cols());
      } else {
        auto Qn = Q.leftCols(neg);
        Xn = Qn * (-lam.head(neg) / mu).asDiagonal() * Qn.transpose();
      }
      S[bi] = V[bi] + mu * Xn;
      dres2 += (X[bi] - Xn).squaredNorm();
      X[bi] = std::move(Xn);
    }

    Eigen::VectorXd xs_new = ws.gather(X);
    Eigen::VectorXd r = A * xs_new - bs;
    double max_abs = 0.0;
    for (int k = 0; k < m; ++k) {
      if (!zero_row[k]) max_abs = std::max(max_abs, std::abs(r(k)) * row_norm(k) * beta);
    }
    double pinf = r.norm() / (1.0 + bs.norm());
    double dinf = mu * std::sqrt(dres2) / (1.0 + cnorm);
    double pobj = cs.dot(xs_new);
    double dobj = bs.dot(y);
    double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    sol.primal_residual = max_abs;
    sol.dual_residual = dinf;
    sol.gap = gap;
    // The last clause keeps the reported pair weakly dual in unscaled units.
    if (max_abs <= eq_target && dinf <= opts.opt_tol && gap <= opts.opt_tol &&
        (dobj - pobj) * beta * gamma <= opts.opt_tol) {
      sol.status = SdpStatus::optimal;
      done = true;
      continue;
    }

    if ((it + 1) % 10 == 0) {
      if (pinf > 10.0 * dinf) {
        mu = std::min(mu * 1.5, 1e6);
      } else if (dinf > 10.0 * pinf) {
        mu = std::max(mu / 1.5, 1e-6);
      }
    }

    if (it + 1 >= 200 && it + 1 - last_check >= 100) {
      Eigen::VectorXd dir = y - y_check;
      if (try_farkas(dir) || try_farkas(y)) {
        done = true;
        continue;
      }
      y_check = y;
      last_check = it + 1;
    }
  }
  sol.iterations = it;

  sol.primal_matrix = ws.assemble(X, beta);
  sol.dual_slack = ws.assemble(S, gamma);
  sol.dual_multipliers = gamma * y.cwiseQuotient(row_norm);
  for (int k = 0; k < m; ++k) {
    if (zero_row[k]) sol.dual_multipliers(k) = 0.0;
  }
  sol.objective_value = objective.dot(sol.primal_matrix);
  sol.dual_objective = b.dot(sol.dual_multipliers);
  return sol;
}

SdpVerifyReport verify_solution(const SdpProblem& problem, const SdpSolution& solution,
                                const SdpVerifyTolerances& tols) {
  SdpVerifyReport rep;
  const auto& X = solution.primal_matrix;
  if (X.rows() != problem.matrix_dim || X.cols() != problem.matrix_dim) {
    rep.violations.push_back("primal matrix has wrong dimensions");
    return rep;
  }
  for (std::size_t k = 0; k < problem.constraints.size(); ++k) {
    const auto& c = problem.constraints[k];
    double res = std::abs(c.matrix.dot(X) - c.rhs);
    if (res > rep.max_residual) {
      rep.max_residual = res;
      rep.worst_constraint = static_cast<int>(k);
    }
    if (res > tols.eq_tol) {
      std::string name = c.label.empty() ? "constraint " + std::to_string(k) : c.label;
      rep.violations.push_back(name + ": residual " + std::to_string(res));
    }
  }
  double asym = (X - X.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, X.cwiseAbs().maxCoeff())) {
    rep.violations.push_back("primal matrix is not symmetric");
  }
  rep.lambda_min = lambda_min(0.5 * (X + X.transpose()));
  if (rep.lambda_min < -tols.psd_tol) {
    rep.violations.push_back("primal matrix has eigenvalue " + std::to_string(rep.lambda_min));
  }
  rep.passed = rep.violations.empty();
  return rep;
}

}  // namespace sos
