#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "structcov/structure.hpp"
#include "support.hpp"

using namespace structcov;
using testing::max_abs;

namespace {

std::vector<LinearStructure> canonical(int k) {
  std::vector<LinearStructure> out{make_unstructured(k), make_diagonal(k)};
  if (k >= 2) {
    out.push_back(make_compound_symmetry(k));
    Matrix z = Matrix::Zero(k, 1);
    z.topRows(k / 2 + 1).setOnes();
    out.push_back(make_variance_components(k, {z}));
  }
  return out;
}

// A theta whose V(theta) is positive definite: coordinates of a random PDS
// matrix projected into the structure, then shifted toward the identity.
ThetaVector valid_theta(const LinearStructure& s) {
  const int k = s.dim();
  for (double shift = 0.0;; shift += 1.0) {
    ThetaVector t = s.coordinates(SymMatrix(testing::random_pds(k) + shift * Matrix::Identity(k, k)));
    if (s.is_valid(t)) return t;
  }
}

Matrix kron_gram(const LinearStructure& s, const PdsMatrix& sigma) {
  const Matrix w = testing::kron_loops(sigma.inverse(), sigma.inverse());
  return s.stacked().transpose() * w * s.stacked();
}

}  // namespace

TEST_CASE("evaluate") {
  const LinearStructure cs = make_compound_symmetry(2);
  CHECK(max_abs(cs.evaluate(ThetaVector{Vector::Unit(2, 0)}).matrix() - Matrix::Identity(2, 2)) == 0.0);

  const LinearStructure un = make_unstructured(2);
  const SymMatrix sigma(testing::random_pds(2));
  CHECK(max_abs(un.evaluate(ThetaVector{vech(sigma)}).matrix() - sigma.matrix()) < 1e-15);

  const SymMatrix zero = cs.evaluate(ThetaVector{Vector::Zero(2)});
  CHECK(max_abs(zero.matrix()) == 0.0);
  CHECK_FALSE(cs.is_valid(ThetaVector{Vector::Zero(2)}));
  CHECK_THROWS_AS(cs.evaluate(ThetaVector{Vector::Zero(3)}), InvalidArgument);

  for (int k = 2; k <= 4; ++k)
    for (const auto& s : canonical(k)) {
      const ThetaVector t{testing::random_vector(s.nparams())};
      CHECK(max_abs(vec(s.evaluate(t).matrix()) - s.stacked() * t.values) < 1e-14);
    }
}

TEST_CASE("coordinates is a left inverse of evaluate") {
  for (int k = 1; k <= 4; ++k)
    for (const auto& s : canonical(k))
      for (int rep = 0; rep < 100; ++rep) {
        const ThetaVector t{testing::random_vector(s.nparams())};
        CHECK(max_abs(s.coordinates(s.evaluate(t)).values - t.values) < 1e-10);
      }

  const SymMatrix sigma(testing::random_pds(3));
  CHECK(max_abs(make_unstructured(3).coordinates(sigma).values - vech(sigma)) < 1e-12);

  const ThetaVector cs = make_compound_symmetry(3).coordinates(SymMatrix(Matrix::Identity(3, 3) + Matrix::Ones(3, 3)));
  CHECK(cs(0) == doctest::Approx(2.0));
  CHECK(cs(1) == doctest::Approx(1.0));
}

TEST_CASE("compound symmetry with V = I + J") {
  // I + J = 2 I + (J - I): the identity coefficient is 2, off-diagonal 1.
  const LinearStructure s = make_compound_symmetry(3);
  const Matrix v = Matrix::Identity(3, 3) + Matrix::Ones(3, 3);
  const ThetaVector t = s.coordinates(SymMatrix(v));
  CHECK(max_abs(s.evaluate(t).matrix() - v) < 1e-14);
}

TEST_CASE("projector") {
  for (int k : {2, 3, 5}) {
    for (const auto& s : canonical(k)) {
      for (int rep = 0; rep < 5; ++rep) {
        const ThetaVector t = valid_theta(s);
        const PdsMatrix sigma(s.evaluate(t));
        const Matrix p = s.projector(sigma);
        const Matrix w = testing::kron_loops(sigma.inverse(), sigma.inverse());
        const Matrix oracle = s.stacked() * kron_gram(s, sigma).inverse() * s.stacked().transpose() * w;
        CHECK(max_abs(p - oracle) <= 1e-10 * (1.0 + max_abs(oracle)));
        CHECK(max_abs(p * p - p) <= 1e-10 * (1.0 + max_abs(p)));
        CHECK(max_abs(p * vec(sigma.matrix()) - vec(sigma.matrix())) <= 1e-10 * (1.0 + max_abs(sigma.matrix())));
        CHECK(p.trace() == doctest::Approx(s.nparams()).epsilon(1e-8));
        CHECK(max_abs(p * commutation_matrix(k) - p) <= 1e-10 * (1.0 + max_abs(p)));
        CHECK(max_abs(s.gram(sigma) - kron_gram(s, sigma)) <= 1e-10 * (1.0 + max_abs(kron_gram(s, sigma))));
      }
    }
  }
}

TEST_CASE("unstructured projector symmetrizes") {
  for (int k = 2; k <= 4; ++k) {
    const LinearStructure s = make_unstructured(k);
    const PdsMatrix sigma(testing::random_pds(k));
    const Matrix a = testing::random_matrix(k, k);
    CHECK(max_abs(s.projector(sigma) * vec(a) - vec(0.5 * (a + a.transpose()))) < 1e-10);
  }
}

TEST_CASE("weighted coordinates recover an in-span target") {
  for (const auto& s : canonical(3)) {
    const ThetaVector t = valid_theta(s);
    const PdsMatrix w(testing::random_pds(3));
    CHECK(max_abs(s.weighted_coordinates(w, s.evaluate(t)).values - t.values) < 1e-10);
  }
}

TEST_CASE("ill-conditioned Gram matrix is reported") {
  // diagonal structure: the Gram matrix is diag(1/sigma_i^2)
  const LinearStructure s = make_diagonal(2);
  Matrix v = Matrix::Identity(2, 2);
  v(1, 1) = 1e-7;
  const PdsMatrix sigma(v);
  CHECK_THROWS_AS(s.gram_inverse(sigma), IllConditioned);
  CHECK_THROWS_AS(s.projector(sigma), IllConditioned);
}

TEST_CASE("make_structure descriptors") {
  const LinearStructure un = make_structure({{"kind", "unstructured"}, {"dim", 2}});
  CHECK(un.nparams() == 3);
  CHECK(max_abs(un.stacked() - duplication_matrix(2)) == 0.0);

  const LinearStructure cs = make_structure({{"kind", "compound-symmetry"}, {"dim", 3}});
  CHECK(cs.nparams() == 2);
  CHECK(max_abs(cs.basis()[0].matrix() - Matrix::Identity(3, 3)) == 0.0);
  CHECK(max_abs(cs.basis()[1].matrix() - (Matrix::Ones(3, 3) - Matrix::Identity(3, 3))) == 0.0);

  const LinearStructure dg = make_structure({{"kind", "diagonal"}, {"dim", 3}});
  CHECK(dg.nparams() == 3);

  const LinearStructure vc =
      make_structure({{"kind", "variance-components"}, {"dim", 3}, {"z", {{{1}, {1}, {1}}}}});
  CHECK(vc.nparams() == 2);
  CHECK(max_abs(vc.basis()[0].matrix() - Matrix::Ones(3, 3)) == 0.0);

  const nlohmann::json same{{"kind", "custom"}, {"dim", 2}, {"basis", {{{1, 0}, {0, 1}}, {{1, 0}, {0, 1}}}}};
  CHECK_THROWS_AS(make_structure(same), InvalidSpec);
  const nlohmann::json asym{{"kind", "custom"}, {"dim", 2}, {"basis", {{{1, 2}, {0, 1}}}}};
  CHECK_THROWS_AS(make_structure(asym), InvalidSpec);
  const nlohmann::json too_many{{"kind", "custom"},
                                {"dim", 1},
                                {"basis", {{{1}}, {{2}}}}};
  CHECK_THROWS_AS(make_structure(too_many), InvalidSpec);
  CHECK_THROWS_AS(make_structure({{"kind", "banana"}, {"dim", 2}}), InvalidSpec);

  const auto path = std::filesystem::temp_directory_path() / "structcov_structure_test.json";
  std::ofstream(path) << nlohmann::json{{"kind", "compound-symmetry"}, {"dim", 4}}.dump();
  CHECK(load_structure(path.string()).nparams() == 2);
  CHECK(describe(load_structure(path.string()))["kind"] == "compound-symmetry");
  std::filesystem::remove(path);
}
