#include "structcov/structure.hpp"

#include <cmath>
#include <fstream>

namespace structcov {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kConditionLimit = 1e12;

}  // namespace

LinearStructure::LinearStructure(std::string kind, std::vector<SymMatrix> basis)
    : kind_(std::move(kind)), basis_(std::move(basis)) {
  if (basis_.empty()) throw InvalidSpec("structure '" + kind_ + "': empty basis");
  dim_ = basis_.front().dim();
  const int l = nparams();
  if (l > vech_length(dim_)) {
    throw InvalidSpec("structure '" + kind_ + "': " + std::to_string(l) + " parameters exceed k(k+1)/2 = " +
                      std::to_string(vech_length(dim_)));
  }
  stacked_.resize(static_cast<Eigen::Index>(dim_) * dim_, l);
  for (int j = 0; j < l; ++j) {
    if (basis_[j].dim() != dim_) throw InvalidSpec("structure '" + kind_ + "': basis matrices differ in size");
    stacked_.col(j) = vec(basis_[j].matrix());
  }
  Eigen::JacobiSVD<Matrix> svd(stacked_);
  const Vector& sv = svd.singularValues();
  if (!(sv(l - 1) > kRankTolerance * sv(0))) {
    throw InvalidSpec("structure '" + kind_ + "': L is rank deficient (singular values " +
                      std::to_string(sv(0)) + " .. " + std::to_string(sv(l - 1)) + ")");
  }
  plain_gram_.compute(stacked_.transpose() * stacked_);
}

SymMatrix LinearStructure::evaluate(const ThetaVector& theta) const {
  if (theta.size() != nparams()) {
    throw InvalidArgument("evaluate: theta has length " + std::to_string(theta.size()) + ", structure has " +
                          std::to_string(nparams()) + " parameters");
  }
  return SymMatrix(unvec(stacked_ * theta.values, dim_));
}

ThetaVector LinearStructure::coordinates(const SymMatrix& v) const {
  if (v.dim() != dim_) throw InvalidArgument("coordinates: matrix dimension mismatch");
  return ThetaVector{plain_gram_.solve(stacked_.transpose() * vec(v.matrix()))};
}

bool LinearStructure::is_valid(const ThetaVector& theta) const {
  return PdsMatrix::is_pds(evaluate(theta));
}

Matrix LinearStructure::gram(const PdsMatrix& sigma) const {
  if (sigma.dim() != dim_) throw InvalidArgument("gram: Sigma dimension mismatch");
  const Matrix& inv = sigma.inverse();
  const int l = nparams();
  std::vector<Matrix> scaled(l);
  for (int j = 0; j < l; ++j) scaled[j] = inv * basis_[j].matrix();
  Matrix g(l, l);
  for (int i = 0; i < l; ++i) {
    for (int j = i; j < l; ++j) {
      // tr(A B) for A = S^-1 L_i, B = S^-1 L_j
      const double t = (scaled[i].transpose().array() * scaled[j].array()).sum();
      g(i, j) = t;
      g(j, i) = t;
    }
  }
  return g;
}

Matrix LinearStructure::gram_inverse(const PdsMatrix& sigma) const {
  const Matrix g = gram(sigma);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 0.0) || ev.maxCoeff() / ev.minCoeff() > kConditionLimit) {
    throw IllConditioned("Gram matrix L^T(S^-1 (x) S^-1)L has condition number " +
                         std::to_string(ev.maxCoeff() / ev.minCoeff()));
  }
  Eigen::LLT<Matrix> chol(g);
  const Matrix inv = chol.solve(Matrix::Identity(g.rows(), g.cols()));
  return 0.5 * (inv + inv.transpose());
}

Matrix LinearStructure::projector(const PdsMatrix& sigma) const {
  const Matrix ginv = gram_inverse(sigma);
  const Matrix& inv = sigma.inverse();
  // L^T W has rows vec(S^-1 L_j S^-1)^T
  Matrix ltw(nparams(), stacked_.rows());
  for (int j = 0; j < nparams(); ++j) ltw.row(j) = vec(inv * basis_[j].matrix() * inv).transpose();
  return stacked_ * ginv * ltw;
}

ThetaVector LinearStructure::weighted_coordinates(const PdsMatrix& weight, const SymMatrix& target) const {
  const Matrix ginv = gram_inverse(weight);
  const Matrix& inv = weight.inverse();
  const Matrix scaled = inv * target.matrix() * inv;
  Vector rhs(nparams());
  for (int j = 0; j < nparams(); ++j) rhs(j) = (basis_[j].matrix().array() * scaled.array()).sum();
  return ThetaVector{ginv * rhs};
}

LinearStructure make_unstructured(int k) {
  if (k < 1) throw InvalidSpec("unstructured: dim must be >= 1");
  std::vector<SymMatrix> basis;
  for (int j = 0; j < k; ++j) {
    for (int i = j; i < k; ++i) {
      Matrix e = Matrix::Zero(k, k);
      e(i, j) = 1.0;
      e(j, i) = 1.0;
      basis.emplace_back(e);
    }
  }
  return LinearStructure("unstructured", std::move(basis));
}

LinearStructure make_compound_symmetry(int k) {
  if (k < 2) throw InvalidSpec("compound-symmetry: dim must be >= 2");
  const Matrix id = Matrix::Identity(k, k);
  return LinearStructure("compound-symmetry", {SymMatrix(id), SymMatrix(Matrix::Ones(k, k) - id)});
}

LinearStructure make_diagonal(int k) {
  if (k < 1) throw InvalidSpec("diagonal: dim must be >= 1");
  std::vector<SymMatrix> basis;
  for (int i = 0; i < k; ++i) {
    Matrix e = Matrix::Zero(k, k);
    e(i, i) = 1.0;
    basis.emplace_back(e);
  }
  return LinearStructure("diagonal", std::move(basis));
}

LinearStructure make_variance_components(int k, const std::vector<Matrix>& z) {
  std::vector<SymMatrix> basis;
  for (const Matrix& zj : z) {
    if (zj.rows() != k) throw InvalidSpec("variance-components: Z matrix must have k rows");
    basis.emplace_back(zj * zj.transpose());
  }
  basis.push_back(SymMatrix::identity(k));
  return LinearStructure("variance-components", std::move(basis));
}

LinearStructure make_custom(int k, const std::vector<Matrix>& basis) {
  std::vector<SymMatrix> sym;
  for (const Matrix& b : basis) {
    if (b.rows() != k || b.cols() != k) throw InvalidSpec("custom: basis matrix is not k x k");
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw InvalidSpec("custom: basis matrix is not symmetric");
    }
    sym.emplace_back(b);
  }
  return LinearStructure("custom", std::move(sym));
}

Matrix matrix_from_json(const nlohmann::json& rows) {
  if (!rows.is_array() || rows.empty() || !rows.front().is_array()) {
    throw InvalidSpec("expected a non-empty row-major array of arrays");
  }
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.front().size());
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) throw InvalidSpec("ragged matrix rows");
    for (Eigen::Index j = 0; j < c; ++j) {
      if (!row[j].is_number()) throw InvalidSpec("matrix entries must be numbers");
      m(i, j) = row[j].get<double>();
    }
  }
  return m;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

LinearStructure make_structure(const nlohmann::json& d) {
  if (!d.is_object() || !d.contains("kind") || !d["kind"].is_string()) {
    throw InvalidSpec("structure descriptor needs a string field \"kind\"");
  }
  if (!d.contains("dim") || !d["dim"].is_number_integer()) {
    throw InvalidSpec("structure descriptor needs an integer field \"dim\"");
  }
  const std::string kind = d["kind"];
  const int k = d["dim"];
  if (k < 1) throw InvalidSpec("structure descriptor: dim must be >= 1");

  auto matrices = [&](const char* field) {
    if (!d.contains(field) || !d[field].is_array()) {
      throw InvalidSpec("structure '" + kind + "' needs an array field \"" + field + "\"");
    }
    std::vector<Matrix> out;
    for (const auto& m : d[field]) out.push_back(matrix_from_json(m));
    return out;
  };

  if (kind == "unstructured") return make_unstructured(k);
  if (kind == "compound-symmetry") return make_compound_symmetry(k);
  if (kind == "diagonal") return make_diagonal(k);
  if (kind == "variance-components") return make_variance_components(k, matrices("z"));
  if (kind == "custom") return make_custom(k, matrices("basis"));
  throw InvalidSpec("unknown structure kind '" + kind + "'");
}

LinearStructure load_structure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot open structure file '" + path + "'");
  nlohmann::json d;
  try {
    in >> d;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec("structure file '" + path + "': " + e.what());
  }
  return make_structure(d);
}

nlohmann::json describe(const LinearStructure& s) {
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& b : s.basis()) basis.push_back(matrix_to_json(b.matrix()));
  return {{"kind", s.kind()}, {"dim", s.dim()}, {"nparams", s.nparams()}, {"basis", basis}};
}

}  // namespace structcov
