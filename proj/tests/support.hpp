#pragma once

#include <random>

#include "structcov/foundations.hpp"

namespace testing {

using structcov::Matrix;
using structcov::Vector;

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240601);
  return gen;
}

inline Matrix random_matrix(int r, int c) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng());
  return m;
}

inline Vector random_vector(int n) { return random_matrix(n, 1); }

inline Matrix random_symmetric(int k) {
  const Matrix a = random_matrix(k, k);
  return 0.5 * (a + a.transpose());
}

inline Matrix random_pds(int k) {
  const Matrix a = random_matrix(k, k);
  return a * a.transpose() + 0.5 * k * Matrix::Identity(k, k);
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Loop-based Kronecker product, independent of the library version.
inline Matrix kron_loops(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index p = 0; p < b.rows(); ++p)
        for (Eigen::Index q = 0; q < b.cols(); ++q) out(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
  return out;
}

// vec by explicit column stacking.
inline Vector vec_loops(const Matrix& a) {
  Vector v(a.size());
  Eigen::Index n = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) v(n++) = a(i, j);
  return v;
}

}  // namespace testing
