#include "sos/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sos/errors.hpp"
#include "sos/rng.hpp"

namespace sos {

Monomial::Monomial(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end());
  for (const auto& [var, power] : factors) {
    if (power == 0) continue;
    if (!factors_.empty() && factors_.back().first == var) {
      factors_.back().second += power;
    } else {
      factors_.emplace_back(var, power);
    }
    degree_ += static_cast<int>(power);
  }
}

Monomial Monomial::variable(std::uint32_t var, std::uint32_t power) {
  return Monomial({{var, power}});
}

Monomial Monomial::from_exponents(std::span<const int> exponents) {
  std::vector<Factor> f;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] < 0) throw InvalidArgument("negative exponent");
    if (exponents[i] > 0) f.emplace_back(static_cast<std::uint32_t>(i), exponents[i]);
  }
  return Monomial(std::move(f));
}

std::uint32_t Monomial::power_of(std::uint32_t var) const noexcept {
  for (const auto& [v, p] : factors_) {
    if (v == var) return p;
    if (v > var) break;
  }
  return 0;
}

std::uint32_t Monomial::var_bound() const noexcept {
  return factors_.empty() ? 0 : factors_.back().first + 1;
}

std::vector<int> Monomial::exponents(std::size_t num_vars) const {
  std::vector<int> e(num_vars, 0);
  for (const auto& [v, p] : factors_) {
    if (v >= num_vars) throw DimensionError("monomial variable out of range");
    e[v] = static_cast<int>(p);
  }
  return e;
}

double Monomial::evaluate(std::span<const double> point) const {
  double r = 1.0;
  for (const auto& [v, p] : factors_) {
    if (v >= point.size()) throw DimensionError("evaluation point too short");
    double x = point[v];
    for (std::uint32_t k = 0; k < p; ++k) r *= x;
  }
  return r;
}

bool Monomial::divide(const Monomial& other, Monomial& quotient) const {
  std::vector<Factor> q;
  std::size_t j = 0;
  for (const auto& [v, p] : factors_) {
    std::uint32_t sub = 0;
    if (j < other.factors_.size() && other.factors_[j].first == v) {
      sub = other.factors_[j].second;
      ++j;
    } else if (j < other.factors_.size() && other.factors_[j].first < v) {
      return false;
    }
    if (sub > p) return false;
    if (p > sub) q.emplace_back(v, p - sub);
  }
  if (j != other.factors_.size()) return false;
  quotient = Monomial(std::move(q));
  return true;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.factors_.reserve(a.factors_.size() + b.factors_.size());
  std::size_t i = 0, j = 0;
  while (i < a.factors_.size() || j < b.factors_.size()) {
    if (j == b.factors_.size() ||
        (i < a.factors_.size() && a.factors_[i].first < b.factors_[j].first)) {
      r.factors_.push_back(a.factors_[i++]);
    } else if (i == a.factors_.size() || b.factors_[j].first < a.factors_[i].first) {
      r.factors_.push_back(b.factors_[j++]);
    } else {
      r.factors_.emplace_back(a.factors_[i].first, a.factors_[i].second + b.factors_[j].second);
      ++i;
      ++j;
    }
  }
  r.degree_ = a.degree_ + b.degree_;
  return r;
}

std::string Monomial::to_string() const {
  if (factors_.empty()) return "1";
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, p] : factors_) {
    if (!first) os << '*';
    first = false;
    os << 'x' << (v + 1);
    if (p > 1) os << '^' << p;
  }
  return os.str();
}

bool GradedLex::operator()(const Monomial& a, const Monomial& b) const noexcept {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  std::size_t n = std::min(fa.size(), fb.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (fa[k].first != fb[k].first) {
      // The one carrying the smaller variable index is lex-larger.
      return fa[k].first < fb[k].first;
    }
    if (fa[k].second != fb[k].second) return fa[k].second > fb[k].second;
  }
  return false;
}

std::size_t MonomialHash::operator()(const Monomial& m) const noexcept {
  std::uint64_t h = 0x84222325CBF29CE4ULL;
  for (const auto& [v, p] : m.factors()) {
    h = mix64(h ^ ((static_cast<std::uint64_t>(v) << 32) | p));
  }
  return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------------------

Polynomial::Polynomial(std::size_t num_vars, TermMap terms) : num_vars_(num_vars) {
  for (auto& [m, c] : terms) add_term(m, c);
}

Polynomial Polynomial::constant(std::size_t num_vars, double value) {
  Polynomial p(num_vars);
  p.add_term(Monomial(), value);
  return p;
}

Polynomial Polynomial::variable(std::size_t num_vars, std::uint32_t var) {
  Polynomial p(num_vars);
  p.add_term(Monomial::variable(var), 1.0);
  return p;
}

Polynomial Polynomial::monomial(std::size_t num_vars, const Monomial& m, double coeff) {
  Polynomial p(num_vars);
  p.add_term(m, coeff);
  return p;
}

Polynomial Polynomial::linear_form(std::span<const double> coeffs) {
  Polynomial p(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    p.add_term(Monomial::variable(static_cast<std::uint32_t>(i)), coeffs[i]);
  }
  return p;
}

int Polynomial::degree() const noexcept {
  // Graded order: the last term has the largest degree.
  return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::max_abs_coefficient() const noexcept {
  double r = 0.0;
  for (const auto& [m, c] : terms_) r = std::max(r, std::abs(c));
  return r;
}

void Polynomial::add_term(const Monomial& m, double coeff) {
  if (m.var_bound() > num_vars_) {
    throw DimensionError("monomial " + m.to_string() + " exceeds num_vars " +
                         std::to_string(num_vars_));
  }
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::evaluate(std::span<const double> point) const {
  if (point.size() != num_vars_) {
    throw DimensionError("point has length " + std::to_string(point.size()) + ", expected " +
                         std::to_string(num_vars_));
  }
  double r = 0.0;
  for (const auto& [m, c] : terms_) r += c * m.evaluate(point);
  return r;
}

Polynomial Polynomial::with_num_vars(std::size_t num_vars) const {
  Polynomial p(num_vars);
  for (const auto& [m, c] : terms_) p.add_term(m, c);
  return p;
}

bool Polynomial::is_even() const noexcept {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return t.first.degree() % 2 == 0; });
}

void Polynomial::check_compatible(const Polynomial& other) const {
  if (num_vars_ != other.num_vars_) {
    throw DimensionError("polynomials over " + std::to_string(num_vars_) + " and " +
                         std::to_string(other.num_vars_) + " variables");
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_compatible(other);
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  check_compatible(other);
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double scale) {
  if (scale == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= scale;
    if (it->second == 0.0) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check_compatible(b);
  Polynomial r(a.num_vars_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
  }
  return r;
}

Polynomial Polynomial::pow(int exponent) const {
  if (exponent < 0) throw InvalidArgument("negative polynomial power");
  Polynomial result = constant(num_vars_, 1.0);
  Polynomial base = *this;
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << '-';
    first = false;
    double a = std::abs(c);
    if (m.is_constant()) {
      os << a;
    } else {
      if (a != 1.0) os << a << '*';
      os << m.to_string();
    }
  }
  return os.str();
}

Polynomial arith(const Polynomial& a, const Polynomial& b, ArithKind kind, double scalar) {
  switch (kind) {
    case ArithKind::add: return a + b;
    case ArithKind::sub: return a - b;
    case ArithKind::mul: return a * b;
    case ArithKind::scale: return a * scalar;
  }
  throw InvalidArgument("unknown arithmetic kind");
}

double max_coefficient_difference(const Polynomial& a, const Polynomial& b) {
  return (a - b).max_abs_coefficient();
}

// ---------------------------------------------------------------------------

HypercubeReduction reduce_hypercube(const Polynomial& p) {
  const std::size_t n = p.num_vars();
  HypercubeReduction out{Polynomial(n), std::vector<Polynomial>(n, Polynomial(n))};
  for (const auto& [m, c] : p.terms()) {
    // x^a = x^(a - 2e_i) (x_i^2 - 1) + x^(a - 2e_i), repeated until every
    // power is at most one.
    auto exps = m.exponents(n);
    for (std::size_t i = 0; i < n; ++i) {
      while (exps[i] >= 2) {
        exps[i] -= 2;
        out.quotients[i].add_term(Monomial::from_exponents(exps), c);
      }
    }
    out.multilinear.add_term(Monomial::from_exponents(exps), c);
  }
  return out;
}

std::vector<double> hypercube_point(std::size_t num_vars, std::uint64_t index) {
  std::vector<double> x(num_vars);
  for (std::size_t i = 0; i < num_vars; ++i) x[i] = ((index >> i) & 1U) ? -1.0 : 1.0;
  return x;
}

Polynomial interpolate_multilinear(std::size_t num_vars, std::span<const double> table) {
  if (num_vars > kMaxInterpolationVars) {
    throw InvalidArgument("multilinear interpolation limited to " +
                          std::to_string(kMaxInterpolationVars) + " variables");
  }
  const std::uint64_t size = std::uint64_t{1} << num_vars;
  if (table.size() != size) {
    throw IncompleteTableError("expected " + std::to_string(size) + " hypercube values, got " +
                               std::to_string(table.size()));
  }
  // Walsh-Hadamard transform: coefficient of prod_{i in S} x_i is the average
  // of f(x) * prod_{i in S} x_i. With bit i set meaning x_i = -1, the
  // character of S at point k is (-1)^popcount(S & k).
  std::vector<double> f(table.begin(), table.end());
  for (std::uint64_t half = 1; half < size; half <<= 1) {
    for (std::uint64_t k = 0; k < size; k += 2 * half) {
      for (std::uint64_t j = k; j < k + half; ++j) {
        double a = f[j], b = f[j + half];
        f[j] = a + b;
        f[j + half] = a - b;
      }
    }
  }
  Polynomial p(num_vars);
  for (std::uint64_t s = 0; s < size; ++s) {
    double coeff = f[s] / static_cast<double>(size);
    if (coeff == 0.0) continue;
    std::vector<Monomial::Factor> factors;
    for (std::size_t i = 0; i < num_vars; ++i) {
      if ((s >> i) & 1U) factors.emplace_back(static_cast<std::uint32_t>(i), 1);
    }
    p.add_term(Monomial(std::move(factors)), coeff);
  }
  return p;
}

Polynomial interpolate_multilinear(std::size_t num_vars,
                                   const std::map<std::vector<int>, double>& values) {
  if (num_vars > kMaxInterpolationVars) {
    throw InvalidArgument("multilinear interpolation limited to " +
                          std::to_string(kMaxInterpolationVars) + " variables");
  }
  const std::uint64_t size = std::uint64_t{1} << num_vars;
  std::vector<double> table(size);
  std::vector<bool> seen(size, false);
  for (const auto& [point, value] : values) {
    if (point.size() != num_vars) throw DimensionError("hypercube point has wrong length");
    std::uint64_t index = 0;
    for (std::size_t i = 0; i < num_vars; ++i) {
      if (point[i] == -1) {
        index |= std::uint64_t{1} << i;
      } else if (point[i] != 1) {
        throw InvalidArgument("hypercube coordinates must be +1 or -1");
      }
    }
    table[index] = value;
    seen[index] = true;
  }
  for (std::uint64_t k = 0; k < size; ++k) {
    if (!seen[k]) {
      throw IncompleteTableError("missing value at hypercube point index " + std::to_string(k));
    }
  }
  return interpolate_multilinear(num_vars, table);
}

Polynomial random_linear_form(std::size_t num_vars, std::uint64_t seed) {
  if (num_vars == 0) throw InvalidArgument("random linear form needs at least one variable");
  CounterRng rng(seed);
  auto v = random_unit_vector(rng, num_vars);
  return Polynomial::linear_form(v);
}

}  // namespace sos
