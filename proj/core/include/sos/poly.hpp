#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sos {

// A monomial x^a stored sparsely as (variable, power) factors with strictly
// increasing variable indices and powers >= 1. The empty monomial is 1.
class Monomial {
 public:
  using Factor = std::pair<std::uint32_t, std::uint32_t>;

  Monomial() = default;
  // Factors may arrive unsorted or repeated; they are merged and zero powers
  // dropped.
  explicit Monomial(std::vector<Factor> factors);

  static Monomial variable(std::uint32_t var, std::uint32_t power = 1);
  static Monomial from_exponents(std::span<const int> exponents);

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  int degree() const noexcept { return degree_; }
  bool is_constant() const noexcept { return factors_.empty(); }
  std::uint32_t power_of(std::uint32_t var) const noexcept;
  // One past the largest variable index, or 0 for the constant monomial.
  std::uint32_t var_bound() const noexcept;

  std::vector<int> exponents(std::size_t num_vars) const;
  double evaluate(std::span<const double> point) const;

  // Monomial quotient; returns false when other does not divide *this.
  bool divide(const Monomial& other, Monomial& quotient) const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) = default;

  std::string to_string() const;

 private:
  std::vector<Factor> factors_;
  int degree_ = 0;
};

// Graded lexicographic order: lower total degree first; within a degree the
// lexicographically larger exponent vector (x1 > x2 > ...) comes first, so
// the basis reads 1, x1, x2, x1^2, x1 x2, x2^2, ...
struct GradedLex {
  bool operator()(const Monomial& a, const Monomial& b) const noexcept;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept;
};

// Sparse multivariate polynomial over the reals. Terms with coefficient 0
// are never stored; the zero polynomial has degree 0.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, double, GradedLex>;

  explicit Polynomial(std::size_t num_vars = 0) : num_vars_(num_vars) {}
  Polynomial(std::size_t num_vars, TermMap terms);

  static Polynomial constant(std::size_t num_vars, double value);
  static Polynomial variable(std::size_t num_vars, std::uint32_t var);
  static Polynomial monomial(std::size_t num_vars, const Monomial& m, double coeff = 1.0);
  // sum_i coeffs[i] * x_i
  static Polynomial linear_form(std::span<const double> coeffs);

  std::size_t num_vars() const noexcept { return num_vars_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  int degree() const noexcept;
  double coefficient(const Monomial& m) const;
  double max_abs_coefficient() const noexcept;

  void add_term(const Monomial& m, double coeff);

  double evaluate(std::span<const double> point) const;

  // Same polynomial viewed with more variables.
  Polynomial with_num_vars(std::size_t num_vars) const;
  // Every monomial has even total degree.
  bool is_even() const noexcept;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double scale);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator-(Polynomial a) { return a *= -1.0; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) = default;

  Polynomial pow(int exponent) const;
  std::string to_string() const;

 private:
  void check_compatible(const Polynomial& other) const;

  std::size_t num_vars_;
  TermMap terms_;
};

enum class ArithKind { add, sub, mul, scale };

// Generic entry point mirroring the operators; `scalar` is used only for
// ArithKind::scale (b is ignored there).
Polynomial arith(const Polynomial& a, const Polynomial& b, ArithKind kind, double scalar = 1.0);

// Largest |coefficient| of a - b.
double max_coefficient_difference(const Polynomial& a, const Polynomial& b);

struct HypercubeReduction {
  Polynomial multilinear;
  std::vector<Polynomial> quotients;  // one per variable
};

// Writes p = multilinear + sum_i quotients[i] * (x_i^2 - 1) exactly.
HypercubeReduction reduce_hypercube(const Polynomial& p);

// Coordinates of hypercube point `index`: bit i set means x_i = -1.
std::vector<double> hypercube_point(std::size_t num_vars, std::uint64_t index);

// Multilinear interpolation from a dense table ordered as hypercube_point.
Polynomial interpolate_multilinear(std::size_t num_vars, std::span<const double> table);
// Same, keyed by +-1 sign vectors; throws IncompleteTableError if any of the
// 2^n points is missing.
Polynomial interpolate_multilinear(std::size_t num_vars,
                                   const std::map<std::vector<int>, double>& values);

constexpr std::size_t kMaxInterpolationVars = 20;

// <u, v> with v uniform on the unit sphere.
Polynomial random_linear_form(std::size_t num_vars, std::uint64_t seed);

}  // namespace sos
