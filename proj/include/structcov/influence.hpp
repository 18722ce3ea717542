#pragma once

// Influence functions of structured S-functionals at elliptical models and
// the gross-error-sensitivity indices of the biweight S-estimator.

#include <string_view>

#include "structcov/structure.hpp"
#include "structcov/weights.hpp"

namespace structcov {

struct InfluenceWeights {
  ScalarFn alpha_c;  // k rho'(s) / (s delta1)
  ScalarFn beta_c;   // rho'(s) s / delta1 - 2 (rho(s) - b0) / delta2
  ScalarFn gamma_c;  // alpha_c(s) s^2 / k - beta_c(s)
  double delta1 = 0.0;
  double delta2 = 0.0;
  double b0 = 0.0;
  int k = 1;
};

/// Throws DegenerateScale when delta1 or delta2 vanishes.
InfluenceWeights influence_weights(const RhoFunction& rho, int k, double b0);

/// rho(s) = s^2/2 with b0 = k/2, i.e. alpha_c == beta_c == 1 (Gaussian ML).
InfluenceWeights gaussian_ml_influence(int k);

struct StructuredInfluence {
  Vector vec_m;  // k^2, equal to L * theta
  Vector theta;  // l
  double distance = 0.0;
};

/// Throws InvalidArgument when V(theta0) is not positive definite.
StructuredInfluence if_structured(const Vector& y, const Vector& mu, const LinearStructure& s,
                                  const ThetaVector& theta0, const InfluenceWeights& w);

enum class HomogeneousTarget { shape, direction, scale, det_direction };

std::string_view target_name(HomogeneousTarget t);
HomogeneousTarget parse_target(std::string_view name);

/// shape: vec(V)/|V|^{1/k} (k^2); direction: theta/|theta| (l);
/// scale: |V|^{1/(2k)} (1); det_direction: theta/|V|^{1/k} (l).
Vector if_homogeneous(const Vector& y, const Vector& mu, const LinearStructure& s, const ThetaVector& theta0,
                      const InfluenceWeights& w, HomogeneousTarget target);

struct GesIndices {
  double g1 = 0.0;  // regression
  double g2 = 0.0;  // shape and direction
  double g3 = 0.0;  // scale
  double c = 0.0;
  int k = 1;
};

/// sup |rho'(s)| = 16c / (25 sqrt 5), attained at s = c/sqrt 5.
double biweight_sup_psi(double c);
/// sup |rho'(s) s| = 4c^2 / 27, attained at s = c/sqrt 3.
double biweight_sup_psi_s(double c);
/// sup |rho(s) - b0| = max(b0, c^2/6 - b0).
double biweight_sup_rho_dev(double c, double b0);

GesIndices ges_indices(int k, double c);

/// max |f| over `points` equispaced nodes of [a, b].
double grid_supremum(const ScalarFn& f, double a, double b, std::size_t points);

}  // namespace structcov
