#include "sos_cli/json_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace sos::cli {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InputError(path + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path, std::string("missing field \"") + key + "\"");
  return *it;
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known,
                    const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) fail(path, "unknown field \"" + it.key() + "\"");
  }
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::int64_t integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

std::size_t num_vars_field(const Json& j, const std::string& path) {
  std::int64_t n = integer(field(j, "num_vars", path), path + ".num_vars");
  if (n < 0) fail(path + ".num_vars", "must be nonnegative");
  return static_cast<std::size_t>(n);
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& path) {
  array(j, path);
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(array(j[0], path + "[0]").size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (static_cast<Eigen::Index>(array(j[r], rp).size()) != cols) fail(rp, "ragged matrix row");
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = number(j[r][c], rp + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

}  // namespace

Json to_json(const Monomial& m) {
  Json out = Json::array();
  for (const auto& [v, p] : m.factors()) out.push_back({v, p});
  return out;
}

Json to_json(const Polynomial& p) {
  Json terms = Json::array();
  for (const auto& [m, c] : p.terms()) terms.push_back({to_json(m), c});
  return Json{{"num_vars", p.num_vars()}, {"terms", std::move(terms)}};
}

Json to_json(const PseudoExpectation& pe) {
  Json moments = Json::array();
  for (const auto& [m, v] : pe.moments()) moments.push_back({to_json(m), v});
  return Json{{"num_vars", pe.num_vars()}, {"degree", pe.degree()}, {"moments", std::move(moments)}};
}

Json to_json(const SosCertificate& cert) {
  Json basis = Json::array();
  for (const auto& m : cert.basis) basis.push_back(to_json(m));
  Json mult = Json::array();
  for (const auto& q : cert.multipliers) mult.push_back(to_json(q));
  Json out{{"num_vars", cert.num_vars},
           {"degree", cert.degree},
           {"gram", to_json(cert.gram)},
           {"basis", std::move(basis)},
           {"multipliers", std::move(mult)}};
  if (cert.ball_radius_sq) out["ball_radius_sq"] = *cert.ball_radius_sq;
  return out;
}

Json to_json(const IdentityReport& r) {
  return Json{{"passed", r.passed},
              {"identity_residual", r.identity_residual},
              {"lambda_min", r.lambda_min},
              {"violations", r.violations}};
}

Json to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(Eigen::VectorXd(m.row(r).transpose())));
  return out;
}

Json to_json(const std::vector<Eigen::VectorXd>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) out.push_back(to_json(v));
  return out;
}

Monomial monomial_from_json(const Json& j, const std::string& path) {
  array(j, path);
  std::vector<Monomial::Factor> factors;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string fp = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2) fail(fp, "expected [var, pow]");
    std::int64_t v = integer(j[i][0], fp + "[0]");
    std::int64_t p = integer(j[i][1], fp + "[1]");
    if (v < 0 || p < 0 || v > UINT32_MAX || p > UINT32_MAX) fail(fp, "variable and power must be nonnegative");
    factors.emplace_back(static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(p));
  }
  try {
    return Monomial(std::move(factors));
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

Polynomial polynomial_from_json(const Json& j, std::size_t num_vars, const std::string& path) {
  if (!j.is_object()) fail(path, "expected a polynomial object");
  reject_unknown(j, {"num_vars", "terms"}, path);
  if (j.contains("num_vars")) {
    std::size_t n = num_vars_field(j, path);
    if (num_vars != 0 && n != num_vars) fail(path + ".num_vars", "disagrees with the system");
    num_vars = n;
  }
  Polynomial p(num_vars);
  const Json& terms = array(field(j, "terms", path), path + ".terms");
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string tp = path + ".terms[" + std::to_string(t) + "]";
    if (!terms[t].is_array() || terms[t].size() != 2) fail(tp, "expected [monomial, coeff]");
    Monomial m = monomial_from_json(terms[t][0], tp + "[0]");
    if (m.var_bound() > num_vars) fail(tp, "variable index out of range");
    p.add_term(m, number(terms[t][1], tp + "[1]"));
  }
  return p;
}

PolynomialSystem system_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected a system object");
  reject_unknown(j, {"num_vars", "objective", "equalities", "inequalities"}, path);
  const std::size_t n = num_vars_field(j, path);
  PolynomialSystem sys(n);
  if (j.contains("objective")) sys.objective = polynomial_from_json(j["objective"], n, path + ".objective");
  if (j.contains("equalities")) {
    const Json& eqs = array(j["equalities"], path + ".equalities");
    for (std::size_t i = 0; i < eqs.size(); ++i) {
      sys.equalities.push_back(
          polynomial_from_json(eqs[i], n, path + ".equalities[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("inequalities")) {
    const Json& ineqs = array(j["inequalities"], path + ".inequalities");
    for (std::size_t i = 0; i < ineqs.size(); ++i) {
      sys.inequalities.push_back(
          polynomial_from_json(ineqs[i], n, path + ".inequalities[" + std::to_string(i) + "]"));
    }
  }
  try {
    sys.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return sys;
}

PseudoExpectation pseudoexpectation_from_json(const Json& j, const std::string& path) {
  const std::size_t n = num_vars_field(j, path);
  const std::int64_t degree = integer(field(j, "degree", path), path + ".degree");
  PseudoExpectation::MomentMap mom;
  const Json& ms = array(field(j, "moments", path), path + ".moments");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const std::string mp = path + ".moments[" + std::to_string(i) + "]";
    if (!ms[i].is_array() || ms[i].size() != 2) fail(mp, "expected [monomial, value]");
    mom[monomial_from_json(ms[i][0], mp + "[0]")] = number(ms[i][1], mp + "[1]");
  }
  try {
    return PseudoExpectation(n, static_cast<int>(degree), std::move(mom));
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

SosCertificate certificate_from_json(const Json& j, const std::string& path) {
  SosCertificate cert;
  cert.num_vars = num_vars_field(j, path);
  cert.degree = static_cast<int>(integer(field(j, "degree", path), path + ".degree"));
  const Json& basis = array(field(j, "basis", path), path + ".basis");
  for (std::size_t i = 0; i < basis.size(); ++i) {
    cert.basis.push_back(monomial_from_json(basis[i], path + ".basis[" + std::to_string(i) + "]"));
  }
  cert.gram = matrix_from_json(field(j, "gram", path), path + ".gram");
  if (cert.gram.rows() != static_cast<Eigen::Index>(cert.basis.size()) ||
      cert.gram.cols() != cert.gram.rows()) {
    fail(path + ".gram", "shape does not match the basis");
  }
  const Json& mult = array(field(j, "multipliers", path), path + ".multipliers");
  const std::size_t mult_vars = j.contains("ball_radius_sq") ? cert.num_vars + 1 : cert.num_vars;
  for (std::size_t i = 0; i < mult.size(); ++i) {
    cert.multipliers.push_back(polynomial_from_json(
        mult[i], mult_vars, path + ".multipliers[" + std::to_string(i) + "]"));
  }
  if (j.contains("ball_radius_sq")) cert.ball_radius_sq = number(j["ball_radius_sq"], path + ".ball_radius_sq");
  return cert;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                     ": malformed JSON");
  }
}

PolynomialSystem read_system(const std::string& path) {
  return system_from_json(parse_json_file(path), path);
}

Graph read_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  try {
    return Graph::parse(in);
  } catch (const Error& e) {
    throw InputError(path + ": " + e.what());
  }
}

Eigen::MatrixXd read_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    int col = 0;
    while (std::getline(ls, cell, ',')) {
      ++col;
      auto b = cell.find_first_not_of(" \t\r");
      auto e = cell.find_last_not_of(" \t\r");
      double v = 0.0;
      const char* lo = b == std::string::npos ? cell.data() : cell.data() + b;
      const char* hi = b == std::string::npos ? cell.data() : cell.data() + e + 1;
      auto [ptr, ec] = std::from_chars(lo, hi, v);
      if (lo == hi || ec != std::errc() || ptr != hi) {
        throw InputError(path + ":" + std::to_string(lineno) + ": column " + std::to_string(col) +
                         " is not a number");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError(path + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(rows.front().size()) + " columns, found " +
                       std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(path + ": no data rows");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

}  // namespace sos::cli
