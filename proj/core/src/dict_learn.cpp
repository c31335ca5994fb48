#include "sos/dict_learn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "sos/errors.hpp"
#include "sos/rng.hpp"
#include "sos/rounding.hpp"

namespace sos {

Dictionary::Dictionary(Eigen::MatrixXd a) : a_(std::move(a)) {
  if (a_.rows() == 0 || a_.cols() == 0) throw InvalidArgument("empty dictionary");
  for (Eigen::Index j = 0; j < a_.cols(); ++j) {
    if (std::abs(a_.col(j).norm() - 1.0) > 1e-10) {
      throw InvalidArgument("dictionary column " + std::to_string(j) + " is not a unit vector");
    }
  }
}

Dictionary Dictionary::identity(int n) { return Dictionary(Eigen::MatrixXd::Identity(n, n)); }

Dictionary Dictionary::random_orthogonal(int n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("dictionary dimension must be positive");
  CounterRng rng(seed);
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    auto row = gaussian_vector(rng, n);
    for (int j = 0; j < n; ++j) g(i, j) = row[j];
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  for (int j = 0; j < n; ++j) q.col(j).normalize();
  return Dictionary(std::move(q));
}

double Dictionary::isotropy_error(int probes, std::uint64_t seed) const {
  CounterRng rng(seed);
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    auto u = random_unit_vector(rng, a_.rows());
    Eigen::Map<Eigen::VectorXd> uv(u.data(), a_.rows());
    worst = std::max(worst, std::abs((a_.transpose() * uv).squaredNorm() / kappa() - 1.0));
  }
  return worst;
}

std::vector<Eigen::VectorXd> Dictionary::columns() const {
  std::vector<Eigen::VectorXd> out;
  for (Eigen::Index j = 0; j < a_.cols(); ++j) out.push_back(a_.col(j));
  return out;
}

Eigen::MatrixXd sample_nice(const NiceDistSpec& spec, int m, int count, std::uint64_t seed) {
  if (spec.d < 2 || spec.d % 2 != 0) throw InvalidArgument("moment order d must be even");
  if (!(spec.rho > 0.0 && spec.rho <= 1.0)) throw InvalidArgument("rho must lie in (0, 1]");
  if (m < 1 || count < 1) throw InvalidArgument("sample shape must be positive");
  const double mag = std::pow(spec.rho, -1.0 / spec.d);
  CounterRng root(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd x(count, m);
  for (int r = 0; r < count; ++r) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(r));
    for (int i = 0; i < m; ++i) {
      double sign = (rng() & 1u) ? 1.0 : -1.0;
      x(r, i) = unif(rng) < spec.rho ? sign * mag : 0.0;
    }
  }
  return x;
}

Eigen::MatrixXd sample_observations(const Dictionary& dict, const NiceDistSpec& spec, int count,
                                    std::uint64_t seed) {
  return sample_nice(spec, dict.cols(), count, seed) * dict.matrix().transpose();
}

Polynomial empirical_poly(const Eigen::MatrixXd& samples, int d) {
  if (samples.rows() < 1) throw InvalidArgument("empirical polynomial needs a sample");
  if (d < 1) throw InvalidArgument("degree must be positive");
  const auto n = static_cast<std::size_t>(samples.cols());
  const double R = static_cast<double>(samples.rows());
  double dfact = 1.0;
  for (int k = 2; k <= d; ++k) dfact *= k;
  Polynomial p(n);
  for (const auto& m : monomials_of_degree(n, d)) {
    double coef = dfact;
    Eigen::ArrayXd prod = Eigen::ArrayXd::Ones(samples.rows());
    for (auto [var, pow] : m.factors()) {
      for (std::uint32_t k = 2; k <= pow; ++k) coef /= k;
      prod *= samples.col(var).array().pow(static_cast<double>(pow));
    }
    p.add_term(m, coef * prod.sum() / R);
  }
  return p;
}

namespace {

Polynomial sphere_constraint(std::size_t n) {
  Polynomial s = Polynomial::constant(n, -1.0);
  for (std::size_t i = 0; i < n; ++i) {
    s += Polynomial::monomial(n, Monomial::variable(static_cast<std::uint32_t>(i), 2));
  }
  return s;
}

}  // namespace

ColumnResult learn_one_column(const Polynomial& p, double tau, std::uint64_t seed,
                              const ColumnOptions& opts,
                              const std::vector<Polynomial>& inequalities) {
  const std::size_t n = p.num_vars();
  if (n < 1) throw InvalidArgument("polynomial has no variables");
  if (opts.n_forms < 1) throw InvalidArgument("need at least one linear form");
  if (opts.degree < p.degree() + 2 * opts.n_forms) {
    throw DegreeError("degree " + std::to_string(opts.degree) + " below deg P + 2 n_forms");
  }
  if (opts.degree - 2 * opts.n_forms < 2) {
    throw DegreeError("reweighted degree must stay at least 2");
  }
  PolynomialSystem sys(n);
  sys.objective = -p;
  sys.equalities.push_back(sphere_constraint(n));
  sys.inequalities = inequalities;
  EstimateReport est = sos_estimate(sys, opts.degree, opts.sos);

  ColumnResult res;
  res.objective = -est.estimate;
  res.sdp_iterations = est.iterations;
  const double floor = 1.0 - tau - opts.slack;
  if (res.objective < floor) {
    throw NoColumnError("pseudo-expected P = " + std::to_string(res.objective) +
                        " below " + std::to_string(floor));
  }
  CounterRng root(seed);
  double best_isolation = 0.0;
  for (int f = 0; f < opts.max_retries; ++f) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(f));
    Polynomial w = Polynomial::constant(n, 1.0);
    for (int k = 0; k < opts.n_forms; ++k) w = w * random_linear_form(n, rng());
    PseudoExpectation pe;
    try {
      pe = reweight(est.witness, w, 1e-8, opts.sos.psd_tol);
    } catch (const DegenerateWeightError&) {
      continue;
    }
    Eigen::MatrixXd second = pe.second_moments();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(second);
    double trace = second.trace();
    if (!(trace > 0.0)) continue;
    double iso = es.eigenvalues()(es.eigenvalues().size() - 1) / trace;
    best_isolation = std::max(best_isolation, iso);
    if (iso < opts.isolation_floor) continue;

    GaussianSampler sampler = match_two_moments(pe, opts.sos.psd_tol);
    auto draws = sample(sampler, static_cast<std::size_t>(opts.samples), rng());
    double best = -std::numeric_limits<double>::infinity();
    for (auto& u : draws) {
      double nu = u.norm();
      if (!(nu > 1e-12)) continue;
      u /= nu;
      std::vector<double> pt(u.data(), u.data() + u.size());
      double v = p.evaluate(pt);
      if (v > best) {
        best = v;
        res.column = u;
      }
    }
    if (res.column.size() == 0) continue;
    res.p_value = best;
    res.isolation = iso;
    res.retries_used = f + 1;
    return res;
  }
  throw IsolationError("no reweighting isolated a direction (best share " +
                       std::to_string(best_isolation) + ")");
}

double symmetrized_hausdorff(const std::vector<Eigen::VectorXd>& s,
                             const std::vector<Eigen::VectorXd>& t) {
  if (s.empty() || t.empty()) throw InvalidArgument("Hausdorff distance of an empty set");
  auto directed = [](const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b) {
    double worst = 0.0;
    for (const auto& x : a) {
      if (x.size() != b.front().size()) throw DimensionError("vectors differ in dimension");
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : b) best = std::min({best, (x - y).norm(), (x + y).norm()});
      worst = std::max(worst, best);
    }
    return worst;
  };
  // Distances from -x mirror those from x, so closing under negation only
  // needs the +/- comparison above.
  return std::max(directed(s, t), directed(t, s));
}

LearnReport learn_dictionary(const Eigen::MatrixXd& samples, const NiceDistSpec& spec,
                             double kappa, std::uint64_t seed, const LearnOptions& opts,
                             const Dictionary* truth) {
  const int n = static_cast<int>(samples.cols());
  const int m = static_cast<int>(std::lround(kappa * n));
  if (m < 1) throw InvalidArgument("kappa * n must be at least 1");
  if (truth && truth->rows() != n) throw DimensionError("truth dictionary dimension mismatch");
  const Polynomial p = empirical_poly(samples, spec.d);
  const auto un = static_cast<std::size_t>(n);
  LearnReport rep;
  std::vector<Polynomial> deflation;
  int failures = 0;
  std::uint64_t attempt = 0;
  while (static_cast<int>(rep.columns.size()) < m) {
    try {
      ColumnResult col = learn_one_column(p, spec.tau(), mix64(seed ^ mix64(attempt++)),
                                          opts.column, deflation);
      std::vector<double> a(col.column.data(), col.column.data() + col.column.size());
      Polynomial l = Polynomial::linear_form(a).with_num_vars(un);
      deflation.push_back(Polynomial::constant(un, 1.0 - opts.gap) - l * l);
      rep.columns.push_back(col.column);
      rep.diagnostics.push_back(std::move(col));
    } catch (const IsolationError& e) {
      if (++failures > opts.max_failures) {
        rep.stalled = true;
        rep.stall_reason = e.what();
        break;
      }
    } catch (const NoColumnError& e) {
      rep.stalled = true;
      rep.stall_reason = e.what();
      break;
    }
  }
  if (truth && !rep.columns.empty()) rep.hausdorff = symmetrized_hausdorff(rep.columns, truth->columns());
  return rep;
}

}  // namespace sos
