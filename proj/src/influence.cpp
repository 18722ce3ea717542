#include "structcov/influence.hpp"

#include <algorithm>
#include <cmath>

#include "structcov/asymptotics.hpp"

namespace structcov {

InfluenceWeights influence_weights(const RhoFunction& rho, int k, double b0) {
  const Deltas d = deltas(rho, k);
  if (!(std::fabs(d.delta1) >= 1e-10) || !(std::fabs(d.delta2) >= 1e-10)) {
    throw DegenerateScale("influence_weights: delta1 = " + std::to_string(d.delta1) +
                          ", delta2 = " + std::to_string(d.delta2));
  }
  InfluenceWeights w;
  w.delta1 = d.delta1;
  w.delta2 = d.delta2;
  w.b0 = b0;
  w.k = k;
  const double d1 = d.delta1, d2 = d.delta2;
  w.alpha_c = [pos = rho.psi_over_s, k, d1](double s) { return k * pos(s) / d1; };
  w.beta_c = [r = rho.rho, dr = rho.drho, b0, d1, d2](double s) {
    return dr(s) * s / d1 - 2.0 * (r(s) - b0) / d2;
  };
  w.gamma_c = [a = w.alpha_c, b = w.beta_c, k](double s) { return a(s) * s * s / k - b(s); };
  return w;
}

InfluenceWeights gaussian_ml_influence(int k) { return influence_weights(least_squares_rho(), k, 0.5 * k); }

namespace {

struct Frame {
  PdsMatrix sigma;
  Vector a;  // Sigma^-1 (y - mu)
  double d2;
  Matrix ginv;
  Vector lt_v;  // L^T vec(a a^T)

  static PdsMatrix checked(const LinearStructure& s, const ThetaVector& theta0) {
    try {
      return PdsMatrix(s.evaluate(theta0));
    } catch (const NotPositiveDefinite& e) {
      throw InvalidArgument(std::string("influence: V(theta0) is not positive definite: ") + e.what());
    }
  }

  Frame(const Vector& y, const Vector& mu, const LinearStructure& s, const ThetaVector& theta0)
      : sigma(checked(s, theta0)) {
    const int k = s.dim();
    if (y.size() != k || mu.size() != k || theta0.size() != s.nparams()) {
      throw InvalidArgument("influence: y, mu or theta0 has the wrong length");
    }
    const Vector r = y - mu;
    a = sigma.inverse() * r;
    d2 = std::max(0.0, r.dot(a));
    ginv = s.gram_inverse(sigma);
    lt_v.resize(s.nparams());
    for (int j = 0; j < s.nparams(); ++j) lt_v(j) = a.dot(s.basis()[j].matrix() * a);
  }
};

}  // namespace

StructuredInfluence if_structured(const Vector& y, const Vector& mu, const LinearStructure& s,
                                  const ThetaVector& theta0, const InfluenceWeights& w) {
  const Frame f(y, mu, s, theta0);
  const double d = std::sqrt(f.d2);
  StructuredInfluence out;
  out.distance = d;
  out.theta = w.alpha_c(d) * (f.ginv * f.lt_v) - w.beta_c(d) * theta0.values;
  out.vec_m = s.stacked() * out.theta;
  return out;
}

std::string_view target_name(HomogeneousTarget t) {
  switch (t) {
    case HomogeneousTarget::shape: return "shape";
    case HomogeneousTarget::direction: return "direction";
    case HomogeneousTarget::scale: return "scale";
    case HomogeneousTarget::det_direction: return "det-direction";
  }
  return "?";
}

HomogeneousTarget parse_target(std::string_view name) {
  for (auto t : {HomogeneousTarget::shape, HomogeneousTarget::direction, HomogeneousTarget::scale,
                 HomogeneousTarget::det_direction}) {
    if (name == target_name(t)) return t;
  }
  throw InvalidArgument("unknown target '" + std::string(name) + "' (shape, direction, scale, det-direction)");
}

Vector if_homogeneous(const Vector& y, const Vector& mu, const LinearStructure& s, const ThetaVector& theta0,
                      const InfluenceWeights& w, HomogeneousTarget target) {
  const Frame f(y, mu, s, theta0);
  const int k = s.dim();
  const double d = std::sqrt(f.d2);
  const double alpha = w.alpha_c(d);
  const Vector& theta = theta0.values;
  const double det_k = std::exp(-f.sigma.log_determinant() / k);  // |Sigma|^{-1/k}

  switch (target) {
    case HomogeneousTarget::shape: {
      const Vector proj = s.stacked() * (f.ginv * f.lt_v);
      return alpha * det_k * (proj - (f.d2 / k) * vec(f.sigma.matrix()));
    }
    case HomogeneousTarget::direction: {
      const double norm = theta.norm();
      if (!(norm > 0.0)) throw InvalidArgument("if_homogeneous: theta0 must be nonzero");
      const Vector g = f.ginv * f.lt_v;
      return alpha * (g / norm - theta * theta.dot(g) / (norm * norm * norm));
    }
    case HomogeneousTarget::scale: {
      Vector out(1);
      out(0) = 0.5 * std::exp(f.sigma.log_determinant() / (2.0 * k)) * w.gamma_c(d);
      return out;
    }
    case HomogeneousTarget::det_direction:
      return alpha * det_k * (f.ginv * f.lt_v - (f.d2 / k) * theta);
  }
  throw InvalidArgument("if_homogeneous: unknown target");
}

double biweight_sup_psi(double c) { return 16.0 * c / (25.0 * std::sqrt(5.0)); }

double biweight_sup_psi_s(double c) { return 4.0 * c * c / 27.0; }

double biweight_sup_rho_dev(double c, double b0) { return std::max(b0, c * c / 6.0 - b0); }

GesIndices ges_indices(int k, double c) {
  const AsymptoticScalars a = biweight_scalars(k, c);
  GesIndices g;
  g.k = k;
  g.c = c;
  g.g1 = biweight_sup_psi(c) / a.alpha;
  g.g2 = k * biweight_sup_psi_s(c) / ((k + 2.0) * a.delta1);
  g.g3 = 2.0 * biweight_sup_rho_dev(c, a.b0) / a.delta2;
  return g;
}

double grid_supremum(const ScalarFn& f, double a, double b, std::size_t points) {
  if (points < 2 || !(b > a)) throw InvalidArgument("grid_supremum: need points >= 2 and b > a");
  double best = 0.0;
  const double h = (b - a) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) best = std::max(best, std::fabs(f(a + h * static_cast<double>(i))));
  return best;
}

}  // namespace structcov
