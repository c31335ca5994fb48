#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sos/certificate.hpp"
#include "sos/errors.hpp"
#include "sos/expansion.hpp"
#include "sos/moment.hpp"
#include "sos/poly.hpp"

namespace sos::cli {

using Json = nlohmann::ordered_json;

// Malformed input file. The message names the file and a line, byte offset
// or JSON path locating the problem.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error("input", what) {}
};

// Monomial: [[var, pow], ...]. Polynomial: {"num_vars": n, "terms":
// [[monomial, coeff], ...]}; num_vars may be omitted inside a system.
Json to_json(const Monomial& m);
Json to_json(const Polynomial& p);
Json to_json(const PseudoExpectation& pe);
Json to_json(const SosCertificate& cert);
Json to_json(const IdentityReport& r);
Json to_json(const Eigen::VectorXd& v);
Json to_json(const Eigen::MatrixXd& m);
Json to_json(const std::vector<Eigen::VectorXd>& vs);

// `path` prefixes error messages, e.g. "sys.json: equalities[1].terms[0]".
Monomial monomial_from_json(const Json& j, const std::string& path);
Polynomial polynomial_from_json(const Json& j, std::size_t num_vars, const std::string& path);
// {"num_vars", "objective"?, "equalities": [...], "inequalities"?: [...]}.
PolynomialSystem system_from_json(const Json& j, const std::string& path);
PseudoExpectation pseudoexpectation_from_json(const Json& j, const std::string& path);
SosCertificate certificate_from_json(const Json& j, const std::string& path);

std::string read_file(const std::string& path);
// Parse errors report line and column.
Json parse_json_file(const std::string& path);
PolynomialSystem read_system(const std::string& path);
Graph read_graph(const std::string& path);
// One row per line, comma separated; blank lines and '#' comments skipped.
Eigen::MatrixXd read_csv(const std::string& path);

}  // namespace sos::cli
