#include "structcov/asymptotics.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "structcov/kernels.hpp"

namespace structcov {

namespace {

const SphericalLaw& standard_gaussian(int k) {
  static std::mutex mu;
  static std::map<int, SphericalLaw> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, SphericalLaw::gaussian(k)).first;
  return it->second;
}

// rho and its derivatives tabulated on a radial rule.
struct RhoTable {
  RadialRule rule;
  std::vector<double> rho, psi, dpsi, pos, dpos;

  RhoTable(const RhoFunction& f, int k) : rule(RadialRule::build(standard_gaussian(k), f.kinks())) {
    const std::size_t n = rule.size();
    rho.resize(n);
    psi.resize(n);
    dpsi.resize(n);
    pos.resize(n);
    dpos.resize(n);
    const auto s = rule.nodes();
    if (f.kind == RhoKind::biweight) {
      kernels::biweight_eval(s, f.cutoff, {rho, psi, dpsi, pos, dpos});
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        rho[i] = f.rho(s[i]);
        psi[i] = f.drho(s[i]);
        dpsi[i] = f.ddrho(s[i]);
        pos[i] = f.psi_over_s(s[i]);
        dpos[i] = f.d_psi_over_s(s[i]);
      }
    }
  }

  std::span<const double> s() const { return rule.nodes(); }

  template <typename F>
  double expect(F&& f) const {
    std::vector<double> v(rule.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(i);
    return rule.expect(v);
  }
};

void require_k(int k) {
  if (k < 1) throw InvalidArgument("dimension k must be >= 1");
}

}  // namespace

Gammas gammas(const WeightTriple& t, const SphericalLaw& law) {
  const int k = law.dim();
  if (t.dim != k) throw InvalidArgument("gammas: triple dimension differs from the law's");
  const double kk = k * (k + 2.0);
  const double e1 = radial_expectation(
      law, [&](double r) { return t.dw2(r) * r * r * r + kk * t.w3(r); }, t.kinks);
  const double e2 = radial_expectation(
      law, [&](double r) { return (k + 2.0) * t.dw3(r) * r - t.dw2(r) * r * r * r; }, t.kinks);
  return {e1 / kk, e2 / (2.0 * kk)};
}

Gammas gammas(const WeightTriple& t) { return gammas(t, standard_gaussian(t.dim)); }

Sigmas sigma12(const WeightTriple& t, const SphericalLaw& law) {
  const int k = law.dim();
  if (t.dim != k) throw InvalidArgument("sigma12: triple dimension differs from the law's");
  const double kk = k * (k + 2.0);
  const double first = radial_expectation(
      law, [&](double r) { return t.dw2(r) * r * r * r + kk * t.w3(r); }, t.kinks);
  const double second = radial_expectation(
      law, [&](double r) { return t.dw2(r) * r * r * r + 2.0 * k * t.w3(r) - k * t.dw3(r) * r; }, t.kinks);
  // first = k(k+2) gamma1 and second = k(gamma1 - k gamma2)
  const double gamma1 = first / kk;
  if (c3_degenerate(first, gamma1) || c3_degenerate(second, gamma1)) {
    throw ConditionC3Violated("sigma12: (C3) denominators are " + std::to_string(first) + " and " +
                              std::to_string(second));
  }
  const double num1 = radial_expectation(
      law,
      [&](double r) {
        const double w = t.w2(r) * r * r;
        return w * w;
      },
      t.kinks);
  const double num2 = radial_expectation(
      law,
      [&](double r) {
        const double d = t.w2(r) * r * r - k * t.w3(r);
        return d * d;
      },
      t.kinks);
  Sigmas out;
  out.sigma1 = kk * num1 / (first * first);
  out.sigma2 = -2.0 / k * out.sigma1 + 4.0 * num2 / (second * second);
  return out;
}

Sigmas sigma12(const WeightTriple& t) { return sigma12(t, standard_gaussian(t.dim)); }

double consistency_constant(const RhoFunction& rho, int k) {
  require_k(k);
  const RhoTable tab(rho, k);
  return tab.rule.expect(tab.rho);
}

RhoFunction with_consistency(RhoFunction rho, int k) {
  rho.b0 = consistency_constant(rho, k);
  return rho;
}

Deltas deltas(const RhoFunction& rho, int k) {
  require_k(k);
  const RhoTable tab(rho, k);
  const auto s = tab.s();
  Deltas d;
  d.delta1 = tab.expect([&](std::size_t i) { return tab.dpsi[i] * s[i] * s[i] + (k + 1.0) * tab.psi[i] * s[i]; }) /
             (k + 2.0);
  d.delta2 = tab.expect([&](std::size_t i) { return tab.psi[i] * s[i]; });
  return d;
}

RegressionScalars regression_scalars(const RhoFunction& rho, int k) {
  require_k(k);
  const RhoTable tab(rho, k);
  RegressionScalars r;
  r.alpha = tab.expect([&](std::size_t i) { return (1.0 - 1.0 / k) * tab.pos[i] + tab.dpsi[i] / k; });
  const double m2 = tab.expect([&](std::size_t i) { return tab.psi[i] * tab.psi[i]; });
  r.lambda = m2 / (k * r.alpha * r.alpha);
  return r;
}

double scale_scalar(const RhoFunction& rho, int k, double b0) {
  require_k(k);
  const RhoTable tab(rho, k);
  const auto s = tab.s();
  const double delta2 = tab.expect([&](std::size_t i) { return tab.psi[i] * s[i]; });
  if (!(std::fabs(delta2) >= 1e-10)) throw DegenerateScale("scale_scalar: delta2 = " + std::to_string(delta2));
  const double m = tab.expect([&](std::size_t i) {
    const double d = tab.rho[i] - b0;
    return d * d;
  });
  return m / (delta2 * delta2);
}

double shape_scalar(const RhoFunction& rho, int k) {
  require_k(k);
  const RhoTable tab(rho, k);
  const auto s = tab.s();
  const double delta1 =
      tab.expect([&](std::size_t i) { return tab.dpsi[i] * s[i] * s[i] + (k + 1.0) * tab.psi[i] * s[i]; }) /
      (k + 2.0);
  const double m = tab.expect([&](std::size_t i) { return tab.psi[i] * tab.psi[i] * s[i] * s[i]; });
  return k * m / ((k + 2.0) * delta1 * delta1);
}

AsymptoticScalars biweight_scalars(int k, double c) {
  require_k(k);
  const RhoFunction rho = biweight(c);
  const RhoTable tab(rho, k);
  const auto s = tab.s();
  const double kk = k * (k + 2.0);

  AsymptoticScalars out;
  out.family = Family::s_rho;
  out.k = k;
  out.cutoff = c;
  out.b0 = tab.rule.expect(tab.rho);
  out.breakdown = out.b0 / rho.sup_rho;

  const double b0 = out.b0;
  auto w2 = [&](std::size_t i) { return k * tab.pos[i]; };
  auto dw2 = [&](std::size_t i) { return k * tab.dpos[i]; };
  auto w3 = [&](std::size_t i) { return tab.psi[i] * s[i] - tab.rho[i] + b0; };
  auto dw3 = [&](std::size_t i) { return tab.dpsi[i] * s[i]; };
  auto cube = [&](std::size_t i) { return s[i] * s[i] * s[i]; };

  const double first = tab.expect([&](std::size_t i) { return dw2(i) * cube(i) + kk * w3(i); });
  const double second = tab.expect([&](std::size_t i) { return dw2(i) * cube(i) + 2.0 * k * w3(i) - k * dw3(i) * s[i]; });
  out.gamma1 = first / kk;
  out.gamma2 = tab.expect([&](std::size_t i) { return (k + 2.0) * dw3(i) * s[i] - dw2(i) * cube(i); }) / (2.0 * kk);
  if (c3_degenerate(first, out.gamma1) || c3_degenerate(second, out.gamma1)) {
    throw ConditionC3Violated("biweight_scalars: (C3) fails at c = " + std::to_string(c));
  }
  const double num1 = tab.expect([&](std::size_t i) {
    const double w = w2(i) * s[i] * s[i];
    return w * w;
  });
  const double num2 = tab.expect([&](std::size_t i) {
    const double d = w2(i) * s[i] * s[i] - k * w3(i);
    return d * d;
  });
  out.sigma1 = kk * num1 / (first * first);
  out.sigma2 = -2.0 / k * out.sigma1 + 4.0 * num2 / (second * second);

  out.delta1 =
      tab.expect([&](std::size_t i) { return tab.dpsi[i] * s[i] * s[i] + (k + 1.0) * tab.psi[i] * s[i]; }) / (k + 2.0);
  out.delta2 = tab.expect([&](std::size_t i) { return tab.psi[i] * s[i]; });
  if (!(std::fabs(out.delta2) >= 1e-10)) throw DegenerateScale("biweight_scalars: delta2 vanishes");
  out.sigma3 = tab.expect([&](std::size_t i) {
    const double d = tab.rho[i] - b0;
    return d * d;
  }) / (out.delta2 * out.delta2);

  out.alpha = tab.expect([&](std::size_t i) { return (1.0 - 1.0 / k) * tab.pos[i] + tab.dpsi[i] / k; });
  out.lambda = tab.expect([&](std::size_t i) { return tab.psi[i] * tab.psi[i]; }) / (k * out.alpha * out.alpha);
  return out;
}

AsymptoticScalars gaussian_ml_scalars(int k) {
  require_k(k);
  AsymptoticScalars out;
  out.family = Family::gaussian_ml;
  out.k = k;
  out.sigma1 = 1.0;
  out.sigma2 = 0.0;
  out.sigma3 = 1.0 / (2.0 * k);
  out.lambda = 1.0;
  out.alpha = 1.0;
  out.gamma1 = 1.0;
  out.gamma2 = 0.0;
  out.delta1 = k;
  out.delta2 = k;
  out.b0 = 0.5 * k;
  return out;
}

double breakdown_for_cutoff(int k, double c) {
  require_k(k);
  const RhoFunction rho = biweight(c);
  return consistency_constant(rho, k) / rho.sup_rho;
}

double cutoff_for_breakdown(int k, double eps_star) {
  require_k(k);
  if (!(eps_star > 0.0 && eps_star <= 0.5)) {
    throw InvalidArgument("cutoff_for_breakdown: breakdown point must lie in (0, 0.5], got " + std::to_string(eps_star));
  }
  // breakdown_for_cutoff is decreasing in c
  double lo = 0.05, hi = 200.0;
  const double f_lo = breakdown_for_cutoff(k, lo) - eps_star;
  const double f_hi = breakdown_for_cutoff(k, hi) - eps_star;
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    throw RootFindError("cutoff_for_breakdown: [0.05, 200] does not bracket breakdown " + std::to_string(eps_star));
  }
  double mid = 0.5 * (lo + hi);
  double resid = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    resid = breakdown_for_cutoff(k, mid) - eps_star;
    if (std::fabs(resid) <= 1e-10 && hi - lo <= 1e-12 * mid) break;
    (resid > 0.0 ? lo : hi) = mid;
    if (hi - lo <= 1e-15 * mid) break;
  }
  if (!(std::fabs(resid) <= 1e-8)) {
    throw RootFindError("cutoff_for_breakdown: residual " + std::to_string(resid) + " after bisection");
  }
  return mid;
}

void require_radial_parameters(double sigma1, double sigma2, int k) {
  if (!(sigma1 >= 0.0) || !(sigma2 >= -2.0 * sigma1 / k - 1e-12 * (1.0 + sigma1))) {
    throw InvalidParameters("need sigma1 >= 0 and sigma2 >= -2 sigma1 / k, got sigma1 = " + std::to_string(sigma1) +
                            ", sigma2 = " + std::to_string(sigma2) + ", k = " + std::to_string(k));
  }
}

LimitCovariances limit_covariances(const LinearStructure& s, const ThetaVector& theta0, double sigma1,
                                   double sigma2) {
  const int k = s.dim();
  require_radial_parameters(sigma1, sigma2, k);
  const PdsMatrix sigma(s.evaluate(theta0));
  const Matrix ginv = s.gram_inverse(sigma);
  const Matrix& l = s.stacked();
  const Vector& theta = theta0.values;
  const Vector vs = vec(sigma.matrix());
  const Matrix proj = l * ginv * l.transpose();
  const double det_scale = std::exp(-2.0 / k * sigma.log_determinant());
  const double norm2 = theta.squaredNorm();
  const Matrix p = Matrix::Identity(theta.size(), theta.size()) - theta * theta.transpose() / norm2;

  LimitCovariances out;
  out.cov_theta = 2.0 * sigma1 * ginv + sigma2 * theta * theta.transpose();
  out.cov_vecV = 2.0 * sigma1 * proj + sigma2 * vs * vs.transpose();
  out.cov_shape = 2.0 * sigma1 * det_scale * (proj - vs * vs.transpose() / k);
  out.cov_direction = 2.0 * sigma1 / norm2 * p * ginv * p;
  out.cov_det_direction = 2.0 * sigma1 * det_scale * (ginv - theta * theta.transpose() / k);
  out.var_scale = 0.25 * (2.0 * sigma1 / k + sigma2) * std::exp(sigma.log_determinant() / k);
  for (Matrix* m : {&out.cov_theta, &out.cov_vecV, &out.cov_shape, &out.cov_direction, &out.cov_det_direction}) {
    *m = 0.5 * (*m + m->transpose());
  }
  return out;
}

Matrix delta_method_variance(const Matrix& jacobian, const Matrix& cov, const std::optional<Vector>& base) {
  if (jacobian.cols() != cov.rows() || cov.rows() != cov.cols()) {
    throw InvalidArgument("delta_method_variance: jacobian has " + std::to_string(jacobian.cols()) +
                          " columns, covariance is " + std::to_string(cov.rows()) + "x" + std::to_string(cov.cols()));
  }
  if (base) {
    if (base->size() != jacobian.cols()) throw InvalidArgument("delta_method_variance: base point length mismatch");
    const double lhs = (jacobian * *base).norm();
    const double rhs = 1e-8 * jacobian.norm() * base->norm();
    if (!(lhs <= rhs)) {
      throw NotOrderZero("delta_method_variance: |J x| = " + std::to_string(lhs) + " exceeds " + std::to_string(rhs));
    }
  }
  const Matrix v = jacobian * cov * jacobian.transpose();
  return 0.5 * (v + v.transpose());
}

Vector shape_map(const PdsMatrix& c) {
  return vec(c.matrix()) * std::exp(-c.log_determinant() / c.dim());
}

Matrix shape_jacobian(const PdsMatrix& c) {
  const int k = c.dim();
  const double scale = std::exp(-c.log_determinant() / k);
  const Eigen::Index n = static_cast<Eigen::Index>(k) * k;
  return scale * (Matrix::Identity(n, n) - vec(c.matrix()) * vec(c.inverse()).transpose() / k);
}

Matrix scale_gradient(const PdsMatrix& c) {
  const int k = c.dim();
  return (1.0 / (2.0 * k)) * std::exp(c.log_determinant() / (2.0 * k)) * vec(c.inverse()).transpose();
}

Matrix direction_jacobian(const Vector& theta) {
  const double norm = theta.norm();
  if (!(norm > 0.0)) throw InvalidArgument("direction_jacobian: theta must be nonzero");
  const Eigen::Index l = theta.size();
  return (Matrix::Identity(l, l) - theta * theta.transpose() / (norm * norm)) / norm;
}

}  // namespace structcov
