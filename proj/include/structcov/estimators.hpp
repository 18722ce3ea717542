#pragma once

// Alternating reweighted solver for the structured estimating equations
//   avg w1(d) X^T V^-1 (y - X beta) = 0,
//   avg L^T (V^-1 (x) V^-1) vec{w2(d) r r^T - w3(d) V} = 0.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "structcov/structure.hpp"
#include "structcov/weights.hpp"

namespace structcov {

struct Dataset {
  int k = 0;
  int q = 0;
  std::vector<Vector> y;  // n vectors of length k
  std::vector<Matrix> x;  // n designs, k x q

  std::size_t size() const { return y.size(); }
  /// Throws InvalidSpec on ragged shapes or a rank-deficient stacked design.
  void validate() const;
};

/// Location model: X_i = I_k, so beta is the centre. Columns of `y` are
/// observations.
Dataset location_dataset(const Matrix& y);

/// CSV with header y_1..y_k, x_1_1..x_k_q (x_r_c is row r, column c of X_i).
Dataset read_dataset_csv(const std::string& path);
/// {"observations": [{"y": [...], "x": [[...], ...]}, ...]}
Dataset read_dataset_json(const std::string& path);
/// Dispatches on the file extension (.json, otherwise CSV).
Dataset read_dataset(const std::string& path);
void write_dataset_csv(const Dataset& d, const std::string& path);

enum class InitMode { ols, given };

struct FitOptions {
  int max_iterations = 500;
  double tolerance = 1e-9;  // on the largest relative parameter change
  InitMode init = InitMode::ols;
  std::optional<Vector> beta_start;
  std::optional<ThetaVector> theta_start;
};

struct FitDiagnostics {
  double last_change = 0.0;
  int halvings = 0;  // step halvings spent keeping V(theta) positive definite
  std::string init;
  std::string message;
};

struct FitResult {
  Vector beta;
  ThetaVector theta;
  std::vector<double> distances;
  int iterations = 0;
  bool converged = false;
  bool pds_valid = false;
  double psi_norm = 0.0;
  FitDiagnostics diagnostics;
};

struct PsiResidual {
  Vector psi_beta;
  Vector psi_theta;
  double norm() const;
};

/// Empirical averages of the two estimating functions. Throws InvalidState
/// when V(theta) is not positive definite.
PsiResidual psi_residual(const Dataset& data, const Vector& beta, const ThetaVector& theta,
                         const LinearStructure& s, const WeightTriple& t);

/// Solution is local: the iteration starts from OLS (or the given start) and
/// does not search globally.
FitResult fit(const Dataset& data, const LinearStructure& s, const WeightTriple& t, const FitOptions& options = {});

nlohmann::json to_json(const FitResult& r);

}  // namespace structcov
