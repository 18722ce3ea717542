#pragma once

// Monte Carlo checks of the projection theorem for radial-type matrices and
// of the limiting covariance of fitted structured estimators.

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "structcov/estimators.hpp"

namespace structcov {

struct RadialProjectionReport {
  double eta_hat = 0.0;  // least-squares slope of mean(T) on theta0
  std::optional<double> sigma1_hat, sigma2_hat;  // not separable when k == 1
  Matrix empirical_cov_t, theory_cov_t;
  Matrix empirical_cov_vecm, theory_cov_vecm;
  double rel_err_t = 0.0, rel_err_vecm = 0.0;
  double max_rel_err = 0.0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  double sigma1 = 0.0, sigma2 = 0.0;
};

/// Draws vec(Sigma^-1/2 N Sigma^-1/2) Gaussian with covariance
/// sigma1 (I + K) + sigma2 vec(I) vec(I)^T, projects vec(M) = Pi_L vec(N),
/// takes T = (L^T L)^-1 L^T vec(M) and compares sample covariances with the
/// theory. Throws InvalidParameters unless sigma1 >= 0, sigma2 >= -2 sigma1/k.
RadialProjectionReport radial_projection_experiment(const LinearStructure& s, const ThetaVector& theta0,
                                                    double sigma1, double sigma2, std::size_t replicates,
                                                    std::uint64_t seed, unsigned threads = 0);

struct EstimatorLimitSetup {
  ThetaVector theta0;
  Vector beta0;
  /// n designs reused across replicates; drawn from a standard Gaussian
  /// ensemble (k x beta0.size()) when empty.
  std::vector<Matrix> designs;
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  FitOptions fit;
};

struct EstimatorLimitReport {
  Matrix empirical_cov_theta, theory_cov_theta;
  Matrix empirical_cov_shape, theory_cov_shape;
  Vector mean_theta_error;  // mean of sqrt(n) (theta_hat - theta0)
  double rel_frobenius_err = 0.0;  // theta
  double rel_frobenius_err_shape = 0.0;
  double sigma1 = 0.0, sigma2 = 0.0;
  std::size_t failures = 0;
  std::size_t n = 0, replicates = 0;
  std::uint64_t seed = 0;
};

/// Throws ExperimentFailure when more than 1% of the replicate fits fail.
EstimatorLimitReport estimator_limit_experiment(const LinearStructure& s, const WeightTriple& t,
                                                const EstimatorLimitSetup& setup, unsigned threads = 0);

/// Dataset y_i = X_i beta0 + V(theta0)^{1/2} z_i with z_i standard Gaussian.
Dataset simulate_dataset(const LinearStructure& s, const ThetaVector& theta0, const Vector& beta0,
                         const std::vector<Matrix>& designs, std::uint64_t seed, std::uint64_t stream);

/// Standard Gaussian k x q designs, n of them.
std::vector<Matrix> gaussian_designs(int k, int q, std::size_t n, std::uint64_t seed);

/// |a - b|_F / |b|_F.
double rel_frobenius(const Matrix& a, const Matrix& b);

/// Sample covariance (divisor rows - 1) of the rows of x.
Matrix sample_covariance(const Matrix& rows);

nlohmann::json to_json(const RadialProjectionReport& r);
nlohmann::json to_json(const EstimatorLimitReport& r);

}  // namespace structcov
