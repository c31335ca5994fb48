#include "sos/rounding.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "sos/errors.hpp"
#include "sos/rng.hpp"

namespace sos {

Eigen::MatrixXd GaussianSampler::covariance() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

Eigen::MatrixXd GaussianSampler::second_moments() const {
  return covariance() + mean * mean.transpose();
}

GaussianSampler sampler_from_moments(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                     double psd_tol) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw DimensionError("covariance does not match mean");
  }
  GaussianSampler s;
  s.mean = mean;
  if (mean.size() == 0) {
    s.eigenvalues.resize(0);
    s.eigenvectors.resize(0, 0);
    return s;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()));
  if (es.info() != Eigen::Success) throw InvalidPseudoExpectation("eigendecomposition failed");
  s.eigenvalues = es.eigenvalues();
  s.eigenvectors = es.eigenvectors();
  if (s.eigenvalues(0) < -psd_tol) {
    throw InvalidPseudoExpectation("covariance eigenvalue " + std::to_string(s.eigenvalues(0)) +
                                   " below -psd_tol");
  }
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    if (s.eigenvalues(k) < 0.0) {
      s.clamped_mass -= s.eigenvalues(k);
      s.eigenvalues(k) = 0.0;
    }
  }
  return s;
}

GaussianSampler match_two_moments(const PseudoExpectation& pe, double psd_tol) {
  if (pe.degree() < 2) throw DegreeError("matching two moments needs degree >= 2");
  Eigen::VectorXd mean = pe.mean();
  Eigen::MatrixXd cov = pe.second_moments() - mean * mean.transpose();
  return sampler_from_moments(mean, cov, psd_tol);
}

std::vector<Eigen::VectorXd> sample(const GaussianSampler& sampler, std::size_t count,
                                    std::uint64_t seed) {
  if (count == 0) throw InvalidArgument("sample count must be positive");
  const std::size_t n = sampler.dim();
  Eigen::VectorXd scale = sampler.eigenvalues.cwiseSqrt();
  CounterRng root(seed);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng = root.split(i);
    auto w = gaussian_vector(rng, n);
    Eigen::VectorXd y = sampler.mean;
    if (n > 0) {
      Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(n));
      y += sampler.eigenvectors * scale.cwiseProduct(wv);
    }
    out.push_back(std::move(y));
  }
  return out;
}

}  // namespace sos
