#include "structcov/foundations.hpp"

#include <cmath>
#include <string>

namespace structcov {

namespace {

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw InvalidArgument(std::string(what) + ": expected a non-empty square matrix, got " +
                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

void require_dim(int k, const char* what) {
  if (k < 1) throw InvalidArgument(std::string(what) + ": dimension must be >= 1");
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& a) {
  require_square(a, "SymMatrix");
  m_ = 0.5 * (a + a.transpose());
}

PdsMatrix::PdsMatrix(const SymMatrix& s) : base_(s) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s.matrix());
  if (eig.info() != Eigen::Success) throw NotPositiveDefinite("PdsMatrix: eigendecomposition failed");
  const Vector& lambda = eig.eigenvalues();
  const double largest = lambda.cwiseAbs().maxCoeff();
  if (!(lambda.minCoeff() > 1e-12 * largest) || !std::isfinite(largest)) {
    throw NotPositiveDefinite("PdsMatrix: smallest eigenvalue " + std::to_string(lambda.minCoeff()) +
                              " is not positive relative to " + std::to_string(largest));
  }
  const Matrix& q = eig.eigenvectors();
  const Vector root = lambda.cwiseSqrt();
  inverse_ = SymMatrix(q * lambda.cwiseInverse().asDiagonal() * q.transpose()).matrix();
  sqrt_ = SymMatrix(q * root.asDiagonal() * q.transpose()).matrix();
  inverse_sqrt_ = SymMatrix(q * root.cwiseInverse().asDiagonal() * q.transpose()).matrix();
  log_det_ = lambda.array().log().sum();
}

bool PdsMatrix::is_pds(const SymMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s.matrix(), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return false;
  const Vector& lambda = eig.eigenvalues();
  const double largest = lambda.cwiseAbs().maxCoeff();
  return std::isfinite(largest) && lambda.minCoeff() > 1e-12 * largest;
}

Vector vec(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix unvec(const Vector& v, int k) {
  require_dim(k, "unvec");
  if (v.size() != static_cast<Eigen::Index>(k) * k) {
    throw InvalidArgument("unvec: length " + std::to_string(v.size()) + " != k^2 for k=" + std::to_string(k));
  }
  return Eigen::Map<const Matrix>(v.data(), k, k);
}

Matrix unvec_symmetric(const Vector& v, int k) {
  return SymMatrix(unvec(v, k)).matrix();
}

Vector vech(const SymMatrix& a) {
  const int k = a.dim();
  Vector out(vech_length(k));
  int idx = 0;
  for (int j = 0; j < k; ++j)
    for (int i = j; i < k; ++i) out(idx++) = a(i, j);
  return out;
}

SymMatrix unvech(const Vector& v, int k) {
  require_dim(k, "unvech");
  if (v.size() != vech_length(k)) {
    throw InvalidArgument("unvech: length " + std::to_string(v.size()) + " != k(k+1)/2 for k=" +
                          std::to_string(k));
  }
  Matrix a(k, k);
  int idx = 0;
  for (int j = 0; j < k; ++j) {
    for (int i = j; i < k; ++i) {
      a(i, j) = v(idx);
      a(j, i) = v(idx);
      ++idx;
    }
  }
  return SymMatrix(a);
}

Matrix duplication_matrix(int k) {
  require_dim(k, "duplication_matrix");
  Matrix d = Matrix::Zero(static_cast<Eigen::Index>(k) * k, vech_length(k));
  int col = 0;
  for (int j = 0; j < k; ++j) {
    for (int i = j; i < k; ++i) {
      d(i + j * k, col) = 1.0;
      d(j + i * k, col) = 1.0;
      ++col;
    }
  }
  return d;
}

Matrix commutation_matrix(int k) {
  require_dim(k, "commutation_matrix");
  const Eigen::Index n = static_cast<Eigen::Index>(k) * k;
  Matrix km = Matrix::Zero(n, n);
  // vec(A)[i + j k] = a_ij lands at vec(A^T)[j + i k]
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) km(j + i * k, i + j * k) = 1.0;
  return km;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace structcov
