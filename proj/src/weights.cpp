#include "structcov/weights.hpp"

#include <cmath>
#include <string>

#include "structcov/error.hpp"

namespace structcov {

std::vector<double> RhoFunction::kinks() const {
  if (std::isfinite(cutoff)) return {cutoff};
  return {};
}

RhoFunction biweight(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("biweight: cutoff must be positive and finite");
  RhoFunction r;
  r.kind = RhoKind::biweight;
  r.cutoff = c;
  r.sup_rho = c * c / 6.0;
  const double inv_c2 = 1.0 / (c * c);
  r.rho = [c, inv_c2](double s) {
    s = std::fabs(s);
    if (s > c) return c * c / 6.0;
    const double t2 = s * s * inv_c2;
    return s * s * (0.5 + t2 * (t2 * (1.0 / 6.0) - 0.5));
  };
  r.drho = [c, inv_c2](double s) {
    if (std::fabs(s) > c) return 0.0;
    const double u = 1.0 - s * s * inv_c2;
    return s * u * u;
  };
  r.ddrho = [c, inv_c2](double s) {
    if (std::fabs(s) > c) return 0.0;
    const double t2 = s * s * inv_c2;
    return (1.0 - t2) * (1.0 - 5.0 * t2);
  };
  r.psi_over_s = [c, inv_c2](double s) {
    if (std::fabs(s) > c) return 0.0;
    const double u = 1.0 - s * s * inv_c2;
    return u * u;
  };
  r.d_psi_over_s = [c, inv_c2](double s) {
    if (std::fabs(s) > c) return 0.0;
    return -4.0 * s * (1.0 - s * s * inv_c2) * inv_c2;
  };
  return r;
}

RhoFunction least_squares_rho() {
  RhoFunction r;
  r.kind = RhoKind::least_squares;
  r.rho = [](double s) { return 0.5 * s * s; };
  r.drho = [](double s) { return s; };
  r.ddrho = [](double) { return 1.0; };
  r.psi_over_s = [](double) { return 1.0; };
  r.d_psi_over_s = [](double) { return 0.0; };
  return r;
}

std::string_view family_name(Family f) {
  switch (f) {
    case Family::gaussian_ml:
      return "gaussian-ml";
    case Family::m_estimator:
      return "m-estimator";
    case Family::s_rho:
      return "s-rho";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "gaussian-ml") return Family::gaussian_ml;
  if (name == "m-estimator") return Family::m_estimator;
  if (name == "s-rho") return Family::s_rho;
  throw InvalidArgument("unknown estimator family '" + std::string(name) + "'");
}

WeightTriple gaussian_ml_triple(int k) {
  if (k < 1) throw InvalidArgument("gaussian_ml_triple: k must be >= 1");
  WeightTriple t;
  t.family = Family::gaussian_ml;
  t.dim = k;
  t.w1 = t.w2 = t.w3 = [](double) { return 1.0; };
  t.dw1 = t.dw2 = t.dw3 = [](double) { return 0.0; };
  return t;
}

WeightTriple m_estimator_triple(int k, MWeights w) {
  if (k < 1) throw InvalidArgument("m_estimator_triple: k must be >= 1");
  if (!w.w1 || !w.w2 || !w.w3 || !w.dw2 || !w.dw3) {
    throw InvalidArgument("m_estimator_triple: w1, w2, w3, w2' and w3' are required");
  }
  WeightTriple t;
  t.family = Family::m_estimator;
  t.dim = k;
  t.w1 = std::move(w.w1);
  t.w2 = std::move(w.w2);
  t.w3 = std::move(w.w3);
  t.dw1 = w.dw1 ? std::move(w.dw1) : ScalarFn([](double) { return 0.0; });
  t.dw2 = std::move(w.dw2);
  t.dw3 = std::move(w.dw3);
  t.kinks = std::move(w.kinks);
  return t;
}

WeightTriple s_rho_triple(const RhoFunction& rho, int k, std::optional<double> b0) {
  if (k < 1) throw InvalidArgument("s_rho_triple: k must be >= 1");
  const std::optional<double> b = b0 ? b0 : rho.b0;
  if (!b) throw MissingConstant("s-rho weights need the consistency constant b0");
  const double kk = k;
  const double bb = *b;
  WeightTriple t;
  t.family = Family::s_rho;
  t.dim = k;
  t.w1 = rho.psi_over_s;
  t.dw1 = rho.d_psi_over_s;
  t.w2 = [f = rho.psi_over_s, kk](double s) { return kk * f(s); };
  t.dw2 = [f = rho.d_psi_over_s, kk](double s) { return kk * f(s); };
  t.w3 = [r = rho.rho, d = rho.drho, bb](double s) { return d(s) * s - r(s) + bb; };
  // d/ds [rho'(s)s - rho(s)] = rho''(s)s
  t.dw3 = [dd = rho.ddrho](double s) { return dd(s) * s; };
  t.kinks = rho.kinks();
  return t;
}

double check_derivatives(const WeightTriple& t, const std::vector<double>& points, double h) {
  double worst = 0.0;
  const std::pair<const ScalarFn*, const ScalarFn*> pairs[] = {{&t.w1, &t.dw1}, {&t.w2, &t.dw2}, {&t.w3, &t.dw3}};
  for (double s : points) {
    for (const auto& [f, df] : pairs) {
      const double fd = ((*f)(s + h) - (*f)(s - h)) / (2.0 * h);
      const double an = (*df)(s);
      worst = std::max(worst, std::fabs(fd - an) / std::max(1.0, std::fabs(an)));
    }
  }
  return worst;
}

bool c3_degenerate(double value, double gamma1) {
  return !(std::fabs(value) >= 1e-10 * (1.0 + std::fabs(gamma1)));
}

RadialCompanions radial_companions(const WeightTriple& t, double gamma1, double gamma2, int k) {
  const double gap = gamma1 - k * gamma2;
  if (c3_degenerate(gamma1, gamma1) || c3_degenerate(gap, gamma1)) {
    throw ConditionC3Violated("radial companions: gamma1 = " + std::to_string(gamma1) +
                              ", gamma1 - k gamma2 = " + std::to_string(gap));
  }
  RadialCompanions rc;
  rc.gamma1 = gamma1;
  rc.gamma2 = gamma2;
  rc.v1 = [w2 = t.w2, gamma1](double s) { return w2(s) / gamma1; };
  rc.v2 = [w2 = t.w2, w3 = t.w3, gamma1, gamma2, gap](double s) {
    return (-gamma2 * w2(s) * s * s + gamma1 * w3(s)) / (gamma1 * gap);
  };
  return rc;
}

}  // namespace structcov
