#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sos/moment.hpp"
#include "sos/poly.hpp"

namespace sos {

// Refutation -1 = z^T G z + sum_i Q_i P_i. When ball_radius_sq is set the
// certificate refutes the system augmented by sum_i x_i^2 + s^2 = M (see
// with_ball), and the last multiplier belongs to that constraint.
struct SosCertificate {
  std::size_t num_vars = 0;
  int degree = 0;
  std::vector<Monomial> basis;
  Eigen::MatrixXd gram;
  std::vector<Polynomial> multipliers;
  std::optional<double> ball_radius_sq;

  Polynomial gram_polynomial() const;
};

struct IdentityReport {
  bool passed = false;
  double identity_residual = 0.0;
  double lambda_min = 0.0;
  std::vector<std::string> violations;
};

IdentityReport verify_certificate(const PolynomialSystem& system, const SosCertificate& cert,
                                  double id_tol = 1e-8, double psd_tol = 1e-7);

// Throws NoCertificateError when a degree-l pseudoexpectation exists and
// AmbiguousError when the solver output decides neither way.
SosCertificate extract_certificate(const PolynomialSystem& system, int degree,
                                   const SosOptions& opts = {});

// {P0 = 0, x_1^2 - 1 = 0, ..., x_n^2 - 1 = 0}.
PolynomialSystem hypercube_system(const Polynomial& p0);

constexpr std::size_t kMaxHypercubeVars = 12;

// Closed-form refutation of hypercube_system(p0); throws SatisfiableError
// carrying a root when p0 vanishes somewhere on the cube.
SosCertificate hypercube_refutation(const Polynomial& p0);

// z^T G z over an arbitrary monomial list.
Polynomial gram_to_polynomial(std::size_t num_vars, const std::vector<Monomial>& basis,
                              const Eigen::MatrixXd& gram);

// target == z^T G z coefficient-wise and G PSD.
IdentityReport verify_sos_identity(const Polynomial& target, const std::vector<Monomial>& basis,
                                   const Eigen::MatrixXd& gram, double id_tol = 1e-8,
                                   double psd_tol = 1e-7);

struct GramDecomposition {
  std::vector<Monomial> basis;
  Eigen::MatrixXd gram;
  IdentityReport report;
};

// Searches a Gram matrix for p; nullopt when none is found.
std::optional<GramDecomposition> find_sos_decomposition(const Polynomial& p,
                                                        const SosOptions& opts = {});

// Smallest B with B * n_form - q = z^T G z, G PSD. `n_gram` is a positive
// definite Gram matrix of n_form over `basis`; it is used to turn the
// numerical optimum into an exactly verified certificate.
struct BoundCertificate {
  double bound = 0.0;
  std::vector<Monomial> basis;
  Eigen::MatrixXd gram;
  Polynomial target;  // bound * n_form - q
  IdentityReport report;
};

BoundCertificate minimize_sos_bound(const Polynomial& q, const Polynomial& n_form,
                                    const std::vector<Monomial>& basis,
                                    const Eigen::MatrixXd& n_gram, const SosOptions& opts = {});

// Exactly one of the two alternatives, each independently verified.
struct DualityOutcome {
  std::optional<SosCertificate> certificate;
  std::optional<PseudoExpectation> pseudoexpectation;
  IdentityReport certificate_report;
  SatisfactionReport satisfaction_report;
};

DualityOutcome resolve_duality(const PolynomialSystem& system, int degree,
                               const SosOptions& opts = {});

}  // namespace sos
