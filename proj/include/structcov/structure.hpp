#pragma once

// Linear covariance structures V(theta) = sum_j theta_j L_j.

#include <string>
#include <vector>

#include <json.hpp>

#include "structcov/foundations.hpp"

namespace structcov {

/// Variance-component vector. A plain value: whether V(theta) is positive
/// definite is checked where it matters, never assumed.
struct ThetaVector {
  Vector values;

  Eigen::Index size() const { return values.size(); }
  double operator()(Eigen::Index j) const { return values(j); }
};

class LinearStructure {
 public:
  /// Validates symmetry, the parameter count and full column rank of L.
  LinearStructure(std::string kind, std::vector<SymMatrix> basis);

  const std::string& kind() const { return kind_; }
  int dim() const { return dim_; }
  int nparams() const { return static_cast<int>(basis_.size()); }
  const std::vector<SymMatrix>& basis() const { return basis_; }
  /// k^2 x l matrix with columns vec(L_j).
  const Matrix& stacked() const { return stacked_; }

  SymMatrix evaluate(const ThetaVector& theta) const;
  ThetaVector coordinates(const SymMatrix& v) const;

  /// Whether V(theta) is positive definite.
  bool is_valid(const ThetaVector& theta) const;

  /// Gram matrix L^T (S^-1 (x) S^-1) L, assembled entrywise as tr(L_i S^-1 L_j S^-1).
  Matrix gram(const PdsMatrix& sigma) const;

  /// Rescaled projection L (L^T W L)^-1 L^T W with W = S^-1 (x) S^-1.
  Matrix projector(const PdsMatrix& sigma) const;

  /// (L^T W L)^-1, after the conditioning check.
  Matrix gram_inverse(const PdsMatrix& sigma) const;

  /// Solves (L^T W L) theta = L^T W vec(target) for W built from `weight`.
  ThetaVector weighted_coordinates(const PdsMatrix& weight, const SymMatrix& target) const;

 private:
  std::string kind_;
  int dim_ = 0;
  std::vector<SymMatrix> basis_;
  Matrix stacked_;
  Eigen::LDLT<Matrix> plain_gram_;  // L^T L
};

LinearStructure make_unstructured(int k);
LinearStructure make_compound_symmetry(int k);
LinearStructure make_diagonal(int k);
/// Basis (Z_1 Z_1^T, ..., Z_m Z_m^T, I_k).
LinearStructure make_variance_components(int k, const std::vector<Matrix>& z);
LinearStructure make_custom(int k, const std::vector<Matrix>& basis);

/// Structure descriptor: {"kind": "...", "dim": k, ...}. "custom" carries
/// "basis" (list of k x k row-major arrays); "variance-components" carries
/// "z" (list of k x m_j row-major arrays).
LinearStructure make_structure(const nlohmann::json& descriptor);
LinearStructure load_structure(const std::string& path);
nlohmann::json describe(const LinearStructure& s);

Matrix matrix_from_json(const nlohmann::json& rows);
nlohmann::json matrix_to_json(const Matrix& m);

}  // namespace structcov
