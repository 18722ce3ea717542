#include <doctest.h>

#include <cmath>

#include "structcov/asymptotics.hpp"
#include "structcov/influence.hpp"
#include "support.hpp"

using namespace structcov;
using testing::max_abs;

namespace {

// Gaussian maximum likelihood functional of the location-scatter model at
// (1-h) N(mu, Sigma) + h delta_y: the centre is the contaminated mean and
// theta solves L^T W(theta) vec(S_h - V(theta)) = 0 by fixed-point iteration.
ThetaVector ml_functional(const LinearStructure& s, const ThetaVector& theta0, const Vector& mu, const Vector& y,
                          double h) {
  const Matrix sigma = s.evaluate(theta0).matrix();
  const Vector mh = (1.0 - h) * mu + h * y;
  const Matrix sh = (1.0 - h) * (sigma + (mu - mh) * (mu - mh).transpose()) + h * (y - mh) * (y - mh).transpose();
  ThetaVector t = theta0;
  for (int it = 0; it < 200; ++it) {
    const ThetaVector next = s.weighted_coordinates(PdsMatrix(s.evaluate(t)), SymMatrix(sh));
    const double step = (next.values - t.values).norm();
    t = next;
    if (step < 1e-15 * (1.0 + t.values.norm())) break;
  }
  return t;
}

// Richardson extrapolation of the difference quotient at h = 1e-3, 1e-4.
template <typename F>
Vector perturbation_limit(F&& functional, const Vector& base) {
  const double h1 = 1e-3, h2 = 1e-4;
  const Vector d1 = (functional(h1) - base) / h1;
  const Vector d2 = (functional(h2) - base) / h2;
  return (h1 * d2 - h2 * d1) / (h1 - h2);
}

double rel(const Vector& a, const Vector& b) { return (a - b).norm() / std::max(1e-12, b.norm()); }

}  // namespace

TEST_CASE("influence weights of the biweight") {
  const int k = 2;
  const double c = 2.661;
  const RhoFunction rho = biweight(c);
  const double b0 = consistency_constant(rho, k);
  const InfluenceWeights w = influence_weights(rho, k, b0);
  for (double s : {c, c + 0.1, 10.0 * c}) {
    CHECK(w.alpha_c(s) == 0.0);
    CHECK(w.beta_c(s) == doctest::Approx(-2.0 * (c * c / 6.0 - b0) / w.delta2).epsilon(1e-14));
  }
  CHECK(w.beta_c(0.0) == doctest::Approx(2.0 * b0 / w.delta2).epsilon(1e-14));
  CHECK(w.alpha_c(0.0) == doctest::Approx(k / w.delta1).epsilon(1e-14));
  for (double s : {0.3, 1.1, 2.0}) {
    CHECK(w.alpha_c(s) == doctest::Approx(k * rho.drho(s) / (s * w.delta1)).epsilon(1e-13));
    CHECK(w.gamma_c(s) == doctest::Approx(w.alpha_c(s) * s * s / k - w.beta_c(s)).epsilon(1e-13));
  }
  // bounded alpha_c
  CHECK(grid_supremum(w.alpha_c, 0.0, 5.0 * c, 10001) <= k / w.delta1 + 1e-12);

  // Fisher consistency of scale: E[gamma_c(|z|)] = 0
  const SphericalLaw law = SphericalLaw::gaussian(k);
  const double kinks[] = {c};
  CHECK(std::fabs(radial_expectation(law, w.gamma_c, kinks)) < 1e-10);
  CHECK(radial_expectation(law, [&](double r) { return w.alpha_c(r) * r * r; }, kinks) ==
        doctest::Approx(k * w.delta2 / w.delta1).epsilon(1e-10));
}

TEST_CASE("least squares rho gives the Gaussian ML weights") {
  for (int k : {1, 2, 4}) {
    const InfluenceWeights w = gaussian_ml_influence(k);
    for (double s : {0.0, 0.7, 3.0}) {
      CHECK(w.alpha_c(s) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(w.beta_c(s) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("structured influence function") {
  const int k = 3;
  const RhoFunction rho = biweight(4.0);
  const InfluenceWeights w = influence_weights(rho, k, consistency_constant(rho, k));
  const LinearStructure cs = make_compound_symmetry(k);
  const ThetaVector th{(Vector(2) << 2.0, 0.6).finished()};
  const Vector mu = testing::random_vector(k);
  const PdsMatrix sigma(cs.evaluate(th));

  const StructuredInfluence at_mu = if_structured(mu, mu, cs, th, w);
  CHECK(max_abs(at_mu.vec_m + w.beta_c(0.0) * vec(sigma.matrix())) < 1e-12);

  for (int rep = 0; rep < 5; ++rep) {
    const Vector y = mu + testing::random_vector(k);
    const StructuredInfluence inf = if_structured(y, mu, cs, th, w);
    CHECK(max_abs(cs.stacked() * inf.theta - inf.vec_m) == 0.0);
  }

  const LinearStructure un = make_unstructured(k);
  const SymMatrix sig_un(testing::random_pds(k));
  const ThetaVector th_un = un.coordinates(sig_un);
  for (int rep = 0; rep < 5; ++rep) {
    const Vector y = mu + testing::random_vector(k);
    const Vector r = y - mu;
    const double d = std::sqrt(r.dot(PdsMatrix(sig_un).inverse() * r));
    const Vector want = vec(w.alpha_c(d) * r * r.transpose() - w.beta_c(d) * sig_un.matrix());
    CHECK(max_abs(if_structured(y, mu, un, th_un, w).vec_m - want) < 1e-10);
  }
  CHECK_THROWS_AS(if_structured(mu, mu, cs, ThetaVector{Vector::Zero(2)}, w), InvalidArgument);
}

TEST_CASE("homogeneous targets follow the chain rule") {
  const int k = 3;
  const double c = 4.0;
  const RhoFunction rho = biweight(c);
  const InfluenceWeights w = influence_weights(rho, k, consistency_constant(rho, k));
  const std::vector<LinearStructure> structures{make_compound_symmetry(k), make_unstructured(k), make_diagonal(k)};
  for (const auto& s : structures) {
    ThetaVector th = s.coordinates(SymMatrix(testing::random_pds(k) + Matrix::Identity(k, k)));
    const PdsMatrix sigma(s.evaluate(th));
    const Vector mu = Vector::Zero(k);
    for (int rep = 0; rep < 5; ++rep) {
      const Vector y = 0.8 * sigma.sqrt() * testing::random_vector(k);
      const StructuredInfluence inf = if_structured(y, mu, s, th, w);
      const Vector shape = if_homogeneous(y, mu, s, th, w, HomogeneousTarget::shape);
      CHECK(max_abs(shape - shape_jacobian(sigma) * inf.vec_m) < 1e-10);
      CHECK(std::fabs((sigma.inverse() * unvec_symmetric(shape, k)).trace()) < 1e-10);
      const Vector dir = if_homogeneous(y, mu, s, th, w, HomogeneousTarget::direction);
      CHECK(max_abs(dir - direction_jacobian(th.values) * inf.theta) < 1e-10);
      const Vector scale = if_homogeneous(y, mu, s, th, w, HomogeneousTarget::scale);
      CHECK(scale(0) == doctest::Approx((scale_gradient(sigma) * inf.vec_m)(0)).epsilon(1e-10));
      const Vector detdir = if_homogeneous(y, mu, s, th, w, HomogeneousTarget::det_direction);
      const double det_k = std::exp(-sigma.log_determinant() / k);
      const Matrix jdet = det_k * (Matrix::Identity(th.size(), th.size()) -
                                   th.values * (vec(sigma.inverse()).transpose() * s.stacked()) / k);
      CHECK(max_abs(detdir - jdet * inf.theta) < 1e-10);
    }
    // beyond the cutoff the shape and direction influence vanish
    const Vector far = 2.0 * c * sigma.sqrt() * Vector::Unit(k, 0);
    CHECK(max_abs(if_homogeneous(far, mu, s, th, w, HomogeneousTarget::shape)) == 0.0);
    CHECK(max_abs(if_homogeneous(far, mu, s, th, w, HomogeneousTarget::direction)) == 0.0);
  }
  CHECK(parse_target("det-direction") == HomogeneousTarget::det_direction);
  CHECK_THROWS_AS(parse_target("size"), InvalidArgument);
}

TEST_CASE("shape influence is proportional to |alpha_c(d) d^2| along rays") {
  const int k = 2;
  const RhoFunction rho = biweight(3.0);
  const InfluenceWeights w = influence_weights(rho, k, consistency_constant(rho, k));
  const LinearStructure s = make_unstructured(k);
  const SymMatrix sig(testing::random_pds(k));
  const ThetaVector th = s.coordinates(sig);
  const PdsMatrix sigma(sig);
  const Vector mu = Vector::Zero(k);
  for (int dir = 0; dir < 4; ++dir) {
    const Vector u = testing::random_vector(k);
    const double d_unit = std::sqrt(u.dot(sigma.inverse() * u));
    std::vector<double> ratios;
    for (double t : {0.3, 1.0, 2.2}) {
      const Vector y = t * u / d_unit;  // d(y) = t
      const double d = t;
      ratios.push_back(if_homogeneous(y, mu, s, th, w, HomogeneousTarget::shape).norm() /
                       std::fabs(w.alpha_c(d) * d * d));
    }
    CHECK(ratios[1] == doctest::Approx(ratios[0]).epsilon(1e-10));
    CHECK(ratios[2] == doctest::Approx(ratios[0]).epsilon(1e-10));
  }
}

TEST_CASE("perturbation oracle for the Gaussian ML functional") {
  const InfluenceWeights w2 = gaussian_ml_influence(2);
  const InfluenceWeights w3 = gaussian_ml_influence(3);
  const Vector mu2 = (Vector(2) << 0.5, -1.0).finished();
  const Vector mu3 = (Vector(3) << 0.2, 0.0, 1.0).finished();

  SUBCASE("unstructured k = 2") {
    const LinearStructure s = make_unstructured(2);
    Matrix m(2, 2);
    m << 2.0, 0.7, 0.7, 1.5;
    const ThetaVector th = s.coordinates(SymMatrix(m));
    for (int p = 0; p < 5; ++p) {
      const Vector y = mu2 + 1.5 * testing::random_vector(2);
      const Vector est =
          perturbation_limit([&](double h) { return ml_functional(s, th, mu2, y, h).values; }, th.values);
      CHECK(rel(est, if_structured(y, mu2, s, th, w2).theta) < 0.01);
    }
  }
  SUBCASE("compound symmetry k = 3 and the homogeneous maps") {
    const LinearStructure s = make_compound_symmetry(3);
    const ThetaVector th{(Vector(2) << 1.5, 0.4).finished()};
    const int k = 3;
    for (int p = 0; p < 5; ++p) {
      const Vector y = mu3 + 1.5 * testing::random_vector(3);
      auto theta_h = [&](double h) { return ml_functional(s, th, mu3, y, h); };
      const Vector est = perturbation_limit([&](double h) { return theta_h(h).values; }, th.values);
      CHECK(rel(est, if_structured(y, mu3, s, th, w3).theta) < 0.01);

      auto scale_of = [&](const ThetaVector& t) {
        Vector v(1);
        v(0) = std::exp(PdsMatrix(s.evaluate(t)).log_determinant() / (2.0 * k));
        return v;
      };
      const Vector scale_est = perturbation_limit([&](double h) { return scale_of(theta_h(h)); }, scale_of(th));
      CHECK(rel(scale_est, if_homogeneous(y, mu3, s, th, w3, HomogeneousTarget::scale)) < 0.01);

      auto shape_of = [&](const ThetaVector& t) { return shape_map(PdsMatrix(s.evaluate(t))); };
      const Vector shape_est = perturbation_limit([&](double h) { return shape_of(theta_h(h)); }, shape_of(th));
      CHECK(rel(shape_est, if_homogeneous(y, mu3, s, th, w3, HomogeneousTarget::shape)) < 0.01);
    }
  }
}

TEST_CASE("closed-form suprema match a dense grid") {
  for (double c : {1.0, 2.661, 4.115, 7.0}) {
    const RhoFunction rho = biweight(c);
    const double g1 = grid_supremum(rho.drho, 0.0, 3.0 * c, 100000);
    CHECK(std::fabs(g1 / biweight_sup_psi(c) - 1.0) < 1e-8);
    const double g2 = grid_supremum([&](double s) { return rho.drho(s) * s; }, 0.0, 3.0 * c, 100000);
    CHECK(std::fabs(g2 / biweight_sup_psi_s(c) - 1.0) < 1e-8);
    for (int k : {1, 2, 10}) {
      const double b0 = consistency_constant(rho, k);
      const double g3 = grid_supremum([&](double s) { return rho.rho(s) - b0; }, 0.0, 3.0 * c, 100000);
      CHECK(std::fabs(g3 / biweight_sup_rho_dev(c, b0) - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("GES indices") {
  // values from an independent scipy quadrature of alpha, delta1, delta2
  const GesIndices a = ges_indices(2, 4.115);
  CHECK(std::fabs(a.g1 - 1.927) < 0.005);
  CHECK(std::fabs(a.g2 - 1.368) < 0.005);
  CHECK(a.g3 == doctest::Approx(3.322259).epsilon(1e-5));

  const GesIndices b = ges_indices(2, 3.722);
  CHECK(std::fabs(b.g2 - 1.344) < 0.005);
  CHECK(std::fabs(b.g1 - 1.947) < 0.005);
  CHECK(std::fabs(b.g3 - 2.844) < 0.005);

  const GesIndices e = ges_indices(5, 5.6768);
  CHECK(std::fabs(e.g1 - 2.595) < 0.01);
  CHECK(std::fabs(e.g2 - 1.271) < 0.005);
  CHECK(e.g3 == doctest::Approx(2.148403).epsilon(1e-5));
  CHECK(breakdown_for_cutoff(5, 5.6768) == doctest::Approx(0.3738).epsilon(1e-3));

  for (int k : {1, 3, 10})
    for (double c : {0.5, 3.0, 20.0}) {
      const GesIndices g = ges_indices(k, c);
      CHECK(g.g1 > 0.0);
      CHECK(g.g2 > 0.0);
      CHECK(g.g3 > 0.0);
      CHECK(std::isfinite(g.g1 + g.g2 + g.g3));
    }
}

TEST_CASE("G1 has an interior minimum over the breakdown point") {
  for (int k : {2, 5, 10}) {
    std::vector<double> g;
    for (int i = 2; i <= 20; ++i) g.push_back(ges_indices(k, cutoff_for_breakdown(k, 0.025 * i)).g1);
    const auto it = std::min_element(g.begin(), g.end());
    CHECK(it != g.begin());
    CHECK(it != g.end() - 1);
  }
}
