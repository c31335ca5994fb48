#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sos/moment.hpp"

namespace sos {

// y = mean + sum_k sqrt(lambda_k) w_k v_k with w standard Gaussian, so that
// E y = mean and E (y - mean)(y - mean)^T = V diag(lambda) V^T.
struct GaussianSampler {
  Eigen::VectorXd mean;
  Eigen::VectorXd eigenvalues;   // ascending, clamped to >= 0
  Eigen::MatrixXd eigenvectors;  // orthonormal columns
  double clamped_mass = 0.0;     // sum of |lambda| removed by clamping

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean.size()); }
  Eigen::MatrixXd covariance() const;
  // E y y^T implied by the factors.
  Eigen::MatrixXd second_moments() const;
};

// Throws InvalidPseudoExpectation when the centered second-moment matrix has
// an eigenvalue below -psd_tol.
GaussianSampler match_two_moments(const PseudoExpectation& pe, double psd_tol = 1e-7);

// From an explicit mean and covariance; same clamping rule.
GaussianSampler sampler_from_moments(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                     double psd_tol = 1e-7);

// Draw i of a given seed depends only on (seed, i).
std::vector<Eigen::VectorXd> sample(const GaussianSampler& sampler, std::size_t count,
                                    std::uint64_t seed);

}  // namespace sos
