#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sos {

struct SymEntry {
  int row;
  int col;
  double value;
};

// Symmetric matrix stored as upper-triangle triplets. An off-diagonal entry
// (i, j, v) stands for v at both (i, j) and (j, i), so it contributes
// 2 v X_ij to the Frobenius product <A, X>. Duplicates are summed.
class SymSparse {
 public:
  SymSparse() = default;

  void add(int i, int j, double v);
  // Throws InvalidArgument when m is not symmetric to `sym_tol`.
  static SymSparse from_dense(const Eigen::MatrixXd& m, double sym_tol = 1e-12);

  const std::vector<SymEntry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  // Sorted, duplicate-free, zero-free copy.
  SymSparse canonical() const;
  Eigen::MatrixXd to_dense(int dim) const;
  double dot(const Eigen::MatrixXd& x) const;
  double frobenius_norm() const;

 private:
  std::vector<SymEntry> entries_;
};

struct SdpConstraint {
  SymSparse matrix;
  double rhs = 0.0;
  std::string label;
};

// minimize <objective, X>  s.t.  <A_k, X> = b_k,  X PSD.
struct SdpProblem {
  int matrix_dim = 0;
  SymSparse objective;
  std::vector<SdpConstraint> constraints;

  // Throws DimensionError / InvalidArgument on malformed data.
  void validate() const;
};

constexpr int kMaxSdpDim = 2000;

enum class SdpStatus { optimal, infeasible, max_iters };
const char* to_string(SdpStatus s);

struct SdpOptions {
  double eq_tol = 1e-6;    // absolute constraint residual
  double psd_tol = 1e-7;
  double opt_tol = 1e-7;   // relative dual residual and duality gap
  double infeas_tol = 1e-7;
  int max_iters = 50000;
  double mu_init = 1.0;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::max_iters;
  Eigen::MatrixXd primal_matrix;
  Eigen::VectorXd dual_multipliers;
  Eigen::MatrixXd dual_slack;
  double objective_value = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;  // max absolute constraint residual
  double dual_residual = 0.0;    // relative
  double gap = 0.0;              // relative
  // Set when status == infeasible: ray y with b'y = 1 and
  // sum_k y_k A_k having largest eigenvalue farkas_value (<= infeas_tol).
  Eigen::VectorXd farkas_ray;
  double farkas_value = 0.0;
};

SdpSolution solve(const SdpProblem& problem, const SdpOptions& opts = {});

struct SdpVerifyTolerances {
  double eq_tol = 1e-6;
  double psd_tol = 1e-7;
};

struct SdpVerifyReport {
  bool passed = false;
  double max_residual = 0.0;
  int worst_constraint = -1;
  double lambda_min = 0.0;
  std::vector<std::string> violations;
};

SdpVerifyReport verify_solution(const SdpProblem& problem, const SdpSolution& solution,
                                const SdpVerifyTolerances& tols = {});

double lambda_min(const Eigen::MatrixXd& m);
double lambda_max(const Eigen::MatrixXd& m);

}  // namespace sos
