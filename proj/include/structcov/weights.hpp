#pragma once

// rho-functions, the (w1, w2, w3) weight triples of the estimating equations,
// and the radial companions (v1, v2).

#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace structcov {

using ScalarFn = std::function<double(double)>;

enum class RhoKind { biweight, least_squares, custom };

struct RhoFunction {
  RhoKind kind = RhoKind::custom;
  double cutoff = std::numeric_limits<double>::infinity();
  ScalarFn rho;
  ScalarFn drho;
  ScalarFn ddrho;
  // rho'(s)/s and its derivative, with their s -> 0 limits at s == 0.
  ScalarFn psi_over_s;
  ScalarFn d_psi_over_s;
  double sup_rho = std::numeric_limits<double>::infinity();
  // Consistency constant E[rho(|z|)]; filled in by consistency_constant().
  std::optional<double> b0;

  /// Points where rho'' is discontinuous; quadrature panels split there.
  std::vector<double> kinks() const;
};

/// Tukey biweight: s^2/2 - s^4/(2c^2) + s^6/(6c^4) on [0, c], c^2/6 beyond.
RhoFunction biweight(double c);

/// rho(s) = s^2/2. The unbounded limit of the biweight; its S-functional is
/// the Gaussian maximum likelihood functional.
RhoFunction least_squares_rho();

enum class Family { gaussian_ml, m_estimator, s_rho };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

struct WeightTriple {
  Family family = Family::gaussian_ml;
  int dim = 1;
  ScalarFn w1, w2, w3;
  ScalarFn dw1, dw2, dw3;
  std::vector<double> kinks;
};

/// User-supplied weights for the m-estimator family. Derivative correctness
/// is the caller's contract (see check_derivatives).
struct MWeights {
  ScalarFn w1, w2, w3;
  ScalarFn dw1, dw2, dw3;
  std::vector<double> kinks;
};

WeightTriple gaussian_ml_triple(int k);
WeightTriple m_estimator_triple(int k, MWeights weights);
/// w1 = rho'(s)/s, w2 = k rho'(s)/s, w3 = rho'(s)s - rho(s) + b0.
/// Uses rho.b0 when `b0` is empty; throws MissingConstant when neither is set.
WeightTriple s_rho_triple(const RhoFunction& rho, int k, std::optional<double> b0 = std::nullopt);

/// Largest relative error between the supplied derivatives and central
/// differences of (w1, w2, w3) over `points`.
double check_derivatives(const WeightTriple& t, const std::vector<double>& points, double h = 1e-6);

struct RadialCompanions {
  ScalarFn v1, v2;
  double gamma1 = 0.0, gamma2 = 0.0;
};

/// Throws ConditionC3Violated when gamma1 or gamma1 - k gamma2 is negligible.
RadialCompanions radial_companions(const WeightTriple& t, double gamma1, double gamma2, int k);

/// The (C3) degeneracy test shared with the asymptotics module.
bool c3_degenerate(double value, double gamma1);

}  // namespace structcov
