#include <doctest.h>

#include <cmath>

#include "structcov/asymptotics.hpp"
#include "structcov/weights.hpp"

using namespace structcov;

TEST_CASE("biweight values") {
  const double c = 2.661;
  const RhoFunction r = biweight(c);
  CHECK(r.rho(c) == doctest::Approx(c * c / 6.0).epsilon(1e-15));
  CHECK(r.rho(2.0 * c) == c * c / 6.0);
  CHECK(r.rho(0.0) == 0.0);
  CHECK(r.drho(0.0) == 0.0);
  CHECK(r.drho(c + 1.0) == 0.0);
  CHECK(r.sup_rho == doctest::Approx(c * c / 6.0));
  for (double s : {0.3, 1.0, 2.0, 2.6}) {
    const double poly = s * s / 2 - std::pow(s, 4) / (2 * c * c) + std::pow(s, 6) / (6 * std::pow(c, 4));
    CHECK(r.rho(s) == doctest::Approx(poly).epsilon(1e-13));
    CHECK(r.drho(s) == doctest::Approx(s * std::pow(1 - s * s / (c * c), 2)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(biweight(0.0), InvalidArgument);
  CHECK_THROWS_AS(biweight(-1.0), InvalidArgument);
}

TEST_CASE("biweight derivatives match central differences") {
  const double c = 3.0;
  const RhoFunction r = biweight(c);
  const double h = 1e-5;
  int checked = 0;
  for (int i = 1; i <= 50; ++i) {
    const double s = 2.0 * c * i / 51.0;
    if (std::fabs(s - c) < 10 * h) continue;
    const double fd1 = (r.rho(s + h) - r.rho(s - h)) / (2 * h);
    const double fd2 = (r.drho(s + h) - r.drho(s - h)) / (2 * h);
    const double fd3 = (r.psi_over_s(s + h) - r.psi_over_s(s - h)) / (2 * h);
    CHECK(std::fabs(fd1 - r.drho(s)) <= 1e-6 * std::max(1.0, std::fabs(r.drho(s))));
    CHECK(std::fabs(fd2 - r.ddrho(s)) <= 1e-6 * std::max(1.0, std::fabs(r.ddrho(s))));
    CHECK(std::fabs(fd3 - r.d_psi_over_s(s)) <= 1e-6 * std::max(1.0, std::fabs(r.d_psi_over_s(s))));
    CHECK(r.psi_over_s(s) == doctest::Approx(r.drho(s) / s).epsilon(1e-12));
    ++checked;
  }
  CHECK(checked >= 48);
  // rho is nondecreasing
  double prev = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = r.rho(3.0 * c * i / 1000.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("gaussian-ml triple") {
  const WeightTriple t = gaussian_ml_triple(3);
  for (double s : {0.0, 0.5, 7.0}) {
    CHECK(t.w1(s) == 1.0);
    CHECK(t.w2(s) == 1.0);
    CHECK(t.w3(s) == 1.0);
    CHECK(t.dw2(s) == 0.0);
  }
  CHECK(family_name(t.family) == "gaussian-ml");
}

TEST_CASE("s-rho biweight triple") {
  const double c = 2.661;
  const int k = 2;
  const RhoFunction rho = with_consistency(biweight(c), k);
  REQUIRE(rho.b0.has_value());
  const double b0 = *rho.b0;
  const WeightTriple t = s_rho_triple(rho, k);
  CHECK(t.w2(0.0) == 2.0);
  CHECK(t.w1(0.0) == 1.0);
  CHECK(t.w3(0.0) == doctest::Approx(b0));
  CHECK(t.w3(c) == doctest::Approx(b0 - c * c / 6.0));
  CHECK(t.w3(5.0 * c) == doctest::Approx(b0 - c * c / 6.0));
  CHECK_THROWS_AS(s_rho_triple(biweight(c), k), MissingConstant);
  CHECK(s_rho_triple(biweight(c), k, 1.0).w3(0.0) == 1.0);

  std::vector<double> pts;
  for (int i = 1; i < 40; ++i) {
    const double s = 2.0 * c * i / 40.0;
    if (std::fabs(s - c) > 1e-3) pts.push_back(s);
  }
  CHECK(check_derivatives(t, pts, 1e-6) < 1e-6);

  // (C2): w2'(s) s^3 and w3'(s) s^2 bounded, checked on [0, 10c]
  double m2 = 0.0, m3 = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    const double s = 10.0 * c * i / 100000.0;
    m2 = std::max(m2, std::fabs(t.dw2(s) * s * s * s));
    m3 = std::max(m3, std::fabs(t.dw3(s) * s * s));
  }
  CHECK(std::isfinite(m2));
  CHECK(m2 < 10.0 * c * c);
  CHECK(m3 < 10.0 * c * c * c);

  // repeated evaluation is bit-identical
  CHECK(t.w3(1.2345) == t.w3(1.2345));
}

TEST_CASE("m-estimator triple carries user callables") {
  MWeights w;
  w.w1 = [](double s) { return 1.0 / (1.0 + s * s); };
  w.w2 = [](double s) { return 3.0 / (1.0 + s * s); };
  w.w3 = [](double) { return 1.0; };
  w.dw1 = [](double s) { return -2.0 * s / ((1.0 + s * s) * (1.0 + s * s)); };
  w.dw2 = [](double s) { return -6.0 * s / ((1.0 + s * s) * (1.0 + s * s)); };
  w.dw3 = [](double) { return 0.0; };
  const WeightTriple t = m_estimator_triple(2, w);
  CHECK(t.family == Family::m_estimator);
  CHECK(check_derivatives(t, {0.1, 0.7, 2.0, 5.0}) < 1e-7);
  CHECK_THROWS_AS(m_estimator_triple(2, MWeights{}), InvalidArgument);
}

TEST_CASE("radial companions") {
  for (int k : {1, 2, 5}) {
    const WeightTriple t = gaussian_ml_triple(k);
    const Gammas g = gammas(t);
    CHECK(g.gamma1 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::fabs(g.gamma2) < 1e-10);
    const RadialCompanions rc = radial_companions(t, g.gamma1, g.gamma2, k);
    for (double s : {0.0, 0.4, 3.0}) {
      CHECK(rc.v1(s) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(rc.v2(s) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(radial_companions(gaussian_ml_triple(2), 1.0, 0.5, 2), ConditionC3Violated);
  CHECK_THROWS_AS(radial_companions(gaussian_ml_triple(2), 0.0, 0.0, 2), ConditionC3Violated);

  const int k = 2;
  const WeightTriple t = s_rho_triple(with_consistency(biweight(2.661), k), k);
  const Gammas g = gammas(t);
  CHECK(std::fabs(g.gamma1 - k * g.gamma2) > 1e-3);
  const RadialCompanions rc = radial_companions(t, g.gamma1, g.gamma2, k);
  for (int i = 0; i < 20; ++i) {
    const double s = 0.2 * i;
    CHECK(rc.v1(s) * g.gamma1 == doctest::Approx(t.w2(s)).epsilon(1e-15));
    const double v2 = (-g.gamma2 * t.w2(s) * s * s + g.gamma1 * t.w3(s)) / (g.gamma1 * (g.gamma1 - k * g.gamma2));
    CHECK(rc.v2(s) == doctest::Approx(v2).epsilon(1e-14));
  }
}

TEST_CASE("family names round trip") {
  for (auto f : {Family::gaussian_ml, Family::m_estimator, Family::s_rho}) CHECK(parse_family(family_name(f)) == f);
  CHECK_THROWS_AS(parse_family("huber"), InvalidArgument);
}
