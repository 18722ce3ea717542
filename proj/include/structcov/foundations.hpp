#pragma once

// Matrix-calculus primitives: vec/vech, duplication and commutation matrices,
// Kronecker products and symmetric / positive definite matrix wrappers.
//
// vec is column-major throughout: vec(A) stacks the columns of A.

#include <Eigen/Dense>

#include "structcov/error.hpp"

namespace structcov {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense symmetric k x k matrix. Construction symmetrizes the input, so
/// entry (i, j) and (j, i) are bit-identical.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& a);

  static SymMatrix identity(int k) { return SymMatrix(Matrix::Identity(k, k)); }
  static SymMatrix zero(int k) { return SymMatrix(Matrix::Zero(k, k)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  Matrix m_;
};

/// Symmetric matrix whose smallest eigenvalue exceeds 1e-12 times the largest.
/// Inverse, square root, inverse square root and determinant are computed
/// once from the eigendecomposition.
class PdsMatrix {
 public:
  explicit PdsMatrix(const SymMatrix& s);
  explicit PdsMatrix(const Matrix& a) : PdsMatrix(SymMatrix(a)) {}

  /// Returns false instead of throwing.
  static bool is_pds(const SymMatrix& s);

  int dim() const { return base_.dim(); }
  const SymMatrix& base() const { return base_; }
  const Matrix& matrix() const { return base_.matrix(); }
  const Matrix& inverse() const { return inverse_; }
  const Matrix& sqrt() const { return sqrt_; }
  const Matrix& inverse_sqrt() const { return inverse_sqrt_; }
  double determinant() const { return std::exp(log_det_); }
  double log_determinant() const { return log_det_; }

 private:
  SymMatrix base_;
  Matrix inverse_;
  Matrix sqrt_;
  Matrix inverse_sqrt_;
  double log_det_ = 0.0;
};

Vector vec(const Matrix& a);
Matrix unvec(const Vector& v, int k);

/// Lower-triangle column stacking (a11, ..., ak1, a22, ..., akk).
Vector vech(const SymMatrix& a);
SymMatrix unvech(const Vector& v, int k);

/// k^2 x k(k+1)/2 matrix with D vech(A) = vec(A).
Matrix duplication_matrix(int k);

/// k^2 x k^2 permutation with K vec(A) = vec(A^T).
Matrix commutation_matrix(int k);

Matrix kronecker(const Matrix& a, const Matrix& b);

/// Symmetric part (A + A^T) / 2 of a k^2-vector read as a k x k matrix.
Matrix unvec_symmetric(const Vector& v, int k);

inline int vech_length(int k) { return k * (k + 1) / 2; }

}  // namespace structcov
