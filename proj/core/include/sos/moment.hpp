#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "sos/poly.hpp"
#include "sos/sdp.hpp"

namespace sos {

// Monomials of degree <= max_degree in graded-lex order.
class MonomialBasis {
 public:
  MonomialBasis() = default;
  MonomialBasis(std::size_t num_vars, int max_degree);
  explicit MonomialBasis(std::vector<Monomial> monomials);

  std::size_t size() const noexcept { return monomials_.size(); }
  const Monomial& operator[](std::size_t i) const { return monomials_[i]; }
  const std::vector<Monomial>& monomials() const noexcept { return monomials_; }
  // -1 when absent.
  int index_of(const Monomial& m) const;

 private:
  std::vector<Monomial> monomials_;
  std::unordered_map<Monomial, int, MonomialHash> index_;
};

std::vector<Monomial> monomials_up_to(std::size_t num_vars, int max_degree);
std::vector<Monomial> monomials_of_degree(std::size_t num_vars, int degree);

// M - sum_i x_i^2 - sum_i multipliers[i] * P_i must be a sum of squares.
struct BoundednessWitness {
  std::vector<Polynomial> multipliers;
  double radius_sq = 0.0;
};

struct PolynomialSystem {
  std::size_t num_vars = 0;
  Polynomial objective;
  std::vector<Polynomial> equalities;
  // g >= 0 constraints, enforced through localizing matrices. Only moment
  // relaxations use them; refutation certificates cover equalities alone.
  std::vector<Polynomial> inequalities;
  std::optional<BoundednessWitness> bounded_witness;

  PolynomialSystem() = default;
  explicit PolynomialSystem(std::size_t n) : num_vars(n), objective(n) {}

  void validate() const;
  int max_constraint_degree() const;
};

// Degree-l linear functional on monomials, stored once per monomial.
class PseudoExpectation {
 public:
  using MomentMap = std::map<Monomial, double, GradedLex>;

  PseudoExpectation() = default;
  PseudoExpectation(std::size_t num_vars, int degree, MomentMap moments);

  static PseudoExpectation point_mass(std::span<const double> point, int degree);
  // Expectation under a finitely supported distribution.
  static PseudoExpectation mixture(const std::vector<std::vector<double>>& points,
                                   std::span<const double> weights, int degree);

  std::size_t num_vars() const noexcept { return num_vars_; }
  int degree() const noexcept { return degree_; }
  const MomentMap& moments() const noexcept { return moments_; }

  // Unlisted monomials of admissible degree have moment 0; degree above l
  // throws DegreeError.
  double moment(const Monomial& m) const;
  double apply(const Polynomial& p) const;

  MonomialBasis matrix_basis() const { return MonomialBasis(num_vars_, degree_ / 2); }
  Eigen::MatrixXd moment_matrix() const;
  Eigen::VectorXd mean() const;
  // Second moments E x_i x_j.
  Eigen::MatrixXd second_moments() const;

  double normalization_error() const;
  double min_eigenvalue() const;
  // Throws InvalidPseudoExpectation on a violated invariant.
  void check_invariants(double psd_tol = 1e-7, double norm_tol = 1e-9) const;

  // Drops every monomial involving a variable >= num_vars.
  PseudoExpectation restrict_vars(std::size_t num_vars) const;

 private:
  std::size_t num_vars_ = 0;
  int degree_ = 0;
  MomentMap moments_;
};

struct RelaxationOptions {
  bool exploit_symmetry = true;
};

// Moment relaxation metadata alongside the SDP it produces.
struct MomentRelaxation {
  SdpProblem sdp;
  PolynomialSystem system;
  std::size_t num_vars = 0;
  int degree = 0;
  MonomialBasis basis;  // indexes the leading moment-matrix block

  // Sign-symmetry character of each monomial (bitmask over the invariance
  // group generators); only character-0 moments can be nonzero.
  std::vector<std::uint64_t> symmetry_generators;
  std::vector<Monomial> moments;  // kept moment monomials, graded-lex
  // Leading-block entries (a <= b) whose monomial product is moments[k];
  // classes[k][0] is the representative carrying objective and row data.
  std::vector<std::vector<std::pair<int, int>>> classes;
  std::unordered_map<Monomial, int, MonomialHash> moment_index;

  int normalization_row = 0;
  struct SatRow {
    int constraint;  // index into sdp.constraints
    int equality;
    Monomial multiplier;
  };
  std::vector<SatRow> sat_rows;

  struct LocalizingBlock {
    int inequality;
    int offset;
    MonomialBasis basis;
  };
  std::vector<LocalizingBlock> localizing;

  // Set when the linear constraints alone are inconsistent; weights give
  // -1 = sum_r weight_r * multiplier_r * P_{equality_r}.
  struct LinearRefutation {
    std::vector<int> equality;
    std::vector<Monomial> multiplier;
    std::vector<double> weight;
  };
  std::optional<LinearRefutation> linear_refutation;

  std::uint64_t character(const Monomial& m) const;
};

// Throws DegreeError when the degree is odd, too small for the system, or
// above kMaxRelaxationDegree.
MomentRelaxation build_relaxation(const PolynomialSystem& system, int degree,
                                  const RelaxationOptions& opts = {});

constexpr int kMaxRelaxationDegree = 12;

struct SosOptions {
  SdpOptions sdp;
  double psd_tol = 1e-7;
  double id_tol = 1e-8;
  double ball_radius_sq = 1e3;
  bool exploit_symmetry = true;
  int repair_iters = 2000;
};

struct EstimateReport {
  double estimate = 0.0;
  PseudoExpectation witness;
  SdpStatus status = SdpStatus::optimal;
  int iterations = 0;
  double primal_residual = 0.0;
  double gap = 0.0;
  int matrix_dim = 0;
  int num_constraints = 0;
  bool ball_added = false;
};

// Sufficient syntactic test: the degree <= 2 equalities without cross terms
// whose squared terms share one sign jointly mention every variable.
bool detect_bounded(const PolynomialSystem& system);

// Confirms system.bounded_witness via an SOS decomposition.
bool verify_boundedness_witness(const PolynomialSystem& system, const SosOptions& opts = {});

// Adds sum_i x_i^2 / radius_sq + s^2 - 1 = 0 with a fresh slack s (the ball
// sum_i x_i^2 <= radius_sq with the slack rescaled to unit size).
PolynomialSystem with_ball(const PolynomialSystem& system, double radius_sq);

struct BoundedSystem {
  PolynomialSystem system;
  bool ball_added = false;
};

// Verifies a supplied witness (InvalidArgument if it fails), accepts
// detect_bounded systems as they are, and otherwise adds the ball.
BoundedSystem ensure_bounded(const PolynomialSystem& system, const SosOptions& opts = {});

// Minimizes L(P0) over degree-l pseudoexpectations satisfying the system.
// Throws RefutableError when none exists.
EstimateReport sos_estimate(const PolynomialSystem& system, int degree, const SosOptions& opts = {});

// Pseudoexpectation from a solved relaxation; repairs the moment matrix so
// it is PSD to psd_tol and satisfies the linear constraints exactly.
PseudoExpectation extract_pseudoexpectation(const MomentRelaxation& relax, const SdpSolution& sol,
                                            const SosOptions& opts = {});

struct SatisfactionReport {
  bool passed = false;
  double max_residual = 0.0;
  int worst_equality = -1;
  Monomial worst_multiplier;
};

SatisfactionReport satisfies(const PseudoExpectation& pe, const PolynomialSystem& system,
                             double eq_tol = 1e-6);

// L'(p) = L(W^2 p) / L(W^2).
PseudoExpectation reweight(const PseudoExpectation& pe, const Polynomial& w,
                           double floor = 1e-8, double psd_tol = 1e-7);

}  // namespace sos
