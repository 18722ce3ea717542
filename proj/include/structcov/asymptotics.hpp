#pragma once

// Limiting-variance scalars for the ML / M / S weight families, the biweight
// breakdown <-> cutoff map, the limiting covariance assemblies for structured
// estimators and the delta method for order-zero homogeneous maps.

#include <optional>

#include "structcov/spherical.hpp"
#include "structcov/structure.hpp"
#include "structcov/weights.hpp"

namespace structcov {

struct Gammas {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

struct Sigmas {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
};

struct Deltas {
  double delta1 = 0.0;
  double delta2 = 0.0;
};

struct RegressionScalars {
  double alpha = 0.0;
  double lambda = 0.0;
};

struct AsymptoticScalars {
  Family family = Family::gaussian_ml;
  int k = 1;
  std::optional<double> cutoff;
  double breakdown = 0.0;  // b0 / sup rho; zero when rho is unbounded
  double sigma1 = 0.0, sigma2 = 0.0, sigma3 = 0.0;
  double lambda = 0.0, alpha = 0.0;
  double gamma1 = 0.0, gamma2 = 0.0;
  double delta1 = 0.0, delta2 = 0.0;
  double b0 = 0.0;

  double are_regression() const { return 1.0 / lambda; }
  double are_shape() const { return 1.0 / sigma1; }
  /// 1/(2k sigma3): least squares attains sigma3 = 1/(2k).
  double are_scale() const { return 1.0 / (2.0 * k * sigma3); }
};

// Weight-triple route: adaptive quadrature on the callables.
Gammas gammas(const WeightTriple& t, const SphericalLaw& law);
Gammas gammas(const WeightTriple& t);
Sigmas sigma12(const WeightTriple& t, const SphericalLaw& law);
Sigmas sigma12(const WeightTriple& t);

// rho route: composite rule, batched through the biweight kernel when
// rho.kind == biweight.
double consistency_constant(const RhoFunction& rho, int k);
/// Copy of rho with b0 filled in.
RhoFunction with_consistency(RhoFunction rho, int k);
Deltas deltas(const RhoFunction& rho, int k);
RegressionScalars regression_scalars(const RhoFunction& rho, int k);
/// E[(rho - b0)^2] / delta2^2.
double scale_scalar(const RhoFunction& rho, int k, double b0);
/// k E[rho'^2 |z|^2] / ((k+2) delta1^2).
double shape_scalar(const RhoFunction& rho, int k);

/// Every scalar for the S-estimator with Tukey biweight cutoff c.
AsymptoticScalars biweight_scalars(int k, double c);
/// Gaussian maximum likelihood: sigma1 = 1, sigma2 = 0 and the rest analytic.
AsymptoticScalars gaussian_ml_scalars(int k);

/// Asymptotic breakdown point b0(c) / (c^2/6) of the biweight S-estimator.
double breakdown_for_cutoff(int k, double c);
/// Inverse of breakdown_for_cutoff by bisection on c in [0.05, 200].
double cutoff_for_breakdown(int k, double eps_star);

struct LimitCovariances {
  Matrix cov_theta;          // l x l
  Matrix cov_vecV;           // k^2 x k^2
  Matrix cov_shape;          // k^2 x k^2, for vec(V)/|V|^{1/k}
  Matrix cov_direction;      // l x l, for theta/|theta|
  Matrix cov_det_direction;  // l x l, for theta/|V(theta)|^{1/k}
  double var_scale = 0.0;    // for |V|^{1/(2k)}
};

LimitCovariances limit_covariances(const LinearStructure& s, const ThetaVector& theta0, double sigma1,
                                   double sigma2);

/// Throws InvalidParameters unless sigma1 >= 0 and sigma2 >= -2 sigma1 / k.
void require_radial_parameters(double sigma1, double sigma2, int k);

/// J cov J^T, symmetrized. With `base`, first asserts J base ~ 0
/// (order-zero homogeneity), throwing NotOrderZero otherwise.
Matrix delta_method_variance(const Matrix& jacobian, const Matrix& cov, const std::optional<Vector>& base = {});

/// H(C) = vec(C) / |C|^{1/k}.
Vector shape_map(const PdsMatrix& c);
/// dH/dvec(C)^T = |C|^{-1/k} (I - vec(C) vec(C^-1)^T / k).
Matrix shape_jacobian(const PdsMatrix& c);
/// d|C|^{1/(2k)} / dvec(C)^T as a row.
Matrix scale_gradient(const PdsMatrix& c);
/// d(theta/|theta|)/dtheta^T.
Matrix direction_jacobian(const Vector& theta);

}  // namespace structcov
