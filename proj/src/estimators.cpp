#include "structcov/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace structcov {

namespace {

void check_shapes(const Dataset& data, const LinearStructure& s, const WeightTriple& t) {
  if (data.k != s.dim()) throw InvalidArgument("dataset dimension differs from the structure's");
  if (t.dim != data.k) throw InvalidArgument("weight triple dimension differs from the dataset's");
}

std::optional<PdsMatrix> try_pds(const SymMatrix& v) {
  if (!PdsMatrix::is_pds(v)) return std::nullopt;
  return PdsMatrix(v);
}

Vector residual(const Dataset& data, std::size_t i, const Vector& beta) { return data.y[i] - data.x[i] * beta; }

std::vector<double> distances(const Dataset& data, const Vector& beta, const PdsMatrix& v) {
  std::vector<double> d(data.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Vector r = residual(data, i, beta);
    d[i] = std::sqrt(std::max(0.0, r.dot(v.inverse() * r)));
  }
  return d;
}

double rel_change(const Vector& a, const Vector& b) { return (a - b).norm() / (1.0 + b.norm()); }

Vector ols(const Dataset& data) {
  Matrix xtx = Matrix::Zero(data.q, data.q);
  Vector xty = Vector::Zero(data.q);
  for (std::size_t i = 0; i < data.size(); ++i) {
    xtx += data.x[i].transpose() * data.x[i];
    xty += data.x[i].transpose() * data.y[i];
  }
  return xtx.ldlt().solve(xty);
}

Vector gls_step(const Dataset& data, const PdsMatrix& v, const WeightTriple& t, const std::vector<double>& d) {
  Matrix a = Matrix::Zero(data.q, data.q);
  Vector b = Vector::Zero(data.q);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double w = t.w1(d[i]);
    const Matrix xv = data.x[i].transpose() * v.inverse();
    a += w * xv * data.x[i];
    b += w * xv * data.y[i];
  }
  return a.ldlt().solve(b);
}

// Weighted scatter sum w2 r r^T / sum w3 and the coordinates solving the
// projection normal equations at the current V.
std::optional<ThetaVector> theta_step(const Dataset& data, const Vector& beta, const PdsMatrix& v,
                                      const LinearStructure& s, const WeightTriple& t,
                                      const std::vector<double>& d) {
  Matrix scatter = Matrix::Zero(data.k, data.k);
  double denom = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Vector r = residual(data, i, beta);
    scatter += t.w2(d[i]) * r * r.transpose();
    denom += t.w3(d[i]);
  }
  if (!(denom > 0.0)) return std::nullopt;
  return s.weighted_coordinates(v, SymMatrix(scatter / denom));
}

}  // namespace

void Dataset::validate() const {
  if (k < 1 || q < 1) throw InvalidSpec("dataset: k and q must be positive");
  if (y.size() != x.size()) throw InvalidSpec("dataset: y and x have different observation counts");
  if (y.empty()) throw InvalidSpec("dataset: no observations");
  Matrix xtx = Matrix::Zero(q, q);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i].size() != k) throw InvalidSpec("dataset: observation " + std::to_string(i + 1) + " has wrong y length");
    if (x[i].rows() != k || x[i].cols() != q) {
      throw InvalidSpec("dataset: observation " + std::to_string(i + 1) + " has a design of the wrong shape");
    }
    if (!y[i].allFinite() || !x[i].allFinite()) {
      throw InvalidSpec("dataset: observation " + std::to_string(i + 1) + " has non-finite entries");
    }
    xtx += x[i].transpose() * x[i];
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(xtx, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  if (!(top > 0.0) || es.eigenvalues().minCoeff() <= 1e-12 * top) {
    throw InvalidSpec("dataset: stacked design does not have full column rank " + std::to_string(q));
  }
}

Dataset location_dataset(const Matrix& y) {
  Dataset d;
  d.k = static_cast<int>(y.rows());
  d.q = d.k;
  d.y.reserve(y.cols());
  for (Eigen::Index i = 0; i < y.cols(); ++i) d.y.push_back(y.col(i));
  d.x.assign(y.cols(), Matrix::Identity(d.k, d.k));
  return d;
}

double PsiResidual::norm() const { return std::sqrt(psi_beta.squaredNorm() + psi_theta.squaredNorm()); }

PsiResidual psi_residual(const Dataset& data, const Vector& beta, const ThetaVector& theta,
                         const LinearStructure& s, const WeightTriple& t) {
  check_shapes(data, s, t);
  if (beta.size() != data.q || theta.size() != s.nparams()) {
    throw InvalidArgument("psi_residual: beta or theta has the wrong length");
  }
  const auto v = try_pds(s.evaluate(theta));
  if (!v) throw InvalidState("psi_residual: V(theta) is not positive definite");
  const Matrix& vi = v->inverse();
  const double n = static_cast<double>(data.size());
  Vector pb = Vector::Zero(data.q);
  Matrix m = Matrix::Zero(data.k, data.k);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Vector r = residual(data, i, beta);
    const Vector a = vi * r;
    const double d = std::sqrt(std::max(0.0, r.dot(a)));
    pb += t.w1(d) * data.x[i].transpose() * a;
    m += t.w2(d) * a * a.transpose() - t.w3(d) * vi;
  }
  // L^T (V^-1 (x) V^-1) vec(B) = [tr(L_j V^-1 B V^-1)]_j, with V^-1 folded into m.
  PsiResidual out;
  out.psi_beta = pb / n;
  out.psi_theta.resize(s.nparams());
  for (int j = 0; j < s.nparams(); ++j) out.psi_theta(j) = s.basis()[j].matrix().cwiseProduct(m).sum() / n;
  return out;
}

FitResult fit(const Dataset& data, const LinearStructure& s, const WeightTriple& t, const FitOptions& options) {
  check_shapes(data, s, t);
  data.validate();
  if (data.size() <= static_cast<std::size_t>(data.q)) throw InvalidArgument("fit: need n > q");
  if (data.size() * static_cast<std::size_t>(data.k) <= static_cast<std::size_t>(s.nparams())) {
    throw InvalidArgument("fit: need n k > l");
  }
  if (options.max_iterations < 0 || !(options.tolerance > 0.0)) throw InvalidArgument("fit: invalid options");

  FitResult res;
  Vector beta;
  ThetaVector theta;
  if (options.init == InitMode::given) {
    if (!options.beta_start || !options.theta_start) throw InvalidArgument("fit: given start needs beta and theta");
    beta = *options.beta_start;
    theta = *options.theta_start;
    if (beta.size() != data.q || theta.size() != s.nparams()) throw InvalidArgument("fit: start has wrong length");
    if (!s.is_valid(theta)) throw InvalidState("fit: starting V(theta) is not positive definite");
    res.diagnostics.init = "given";
  } else {
    beta = ols(data);
    Matrix scatter = Matrix::Zero(data.k, data.k);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const Vector r = residual(data, i, beta);
      scatter += r * r.transpose();
    }
    scatter /= static_cast<double>(data.size());
    theta = s.coordinates(SymMatrix(scatter));
    res.diagnostics.init = "ols";
    if (!s.is_valid(theta)) {
      const ThetaVector iso = s.coordinates(SymMatrix(scatter.trace() / data.k * Matrix::Identity(data.k, data.k)));
      double shrink = 0.5;
      for (int i = 0; i < 60 && !s.is_valid(theta); ++i, shrink *= 0.5) {
        theta.values = shrink * theta.values + (1.0 - shrink) * iso.values;
      }
      if (!s.is_valid(theta)) throw InvalidState("fit: no positive definite starting value found");
      res.diagnostics.init = "ols-shrunk";
    }
  }

  PdsMatrix v(s.evaluate(theta));
  std::vector<double> d = distances(data, beta, v);
  bool small_step = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Vector beta_new = gls_step(data, v, t, d);
    d = distances(data, beta_new, v);
    const auto proposal = theta_step(data, beta_new, v, s, t, d);
    if (!proposal) {
      res.diagnostics.message = "sum of w3 weights is not positive";
      break;
    }
    ThetaVector theta_new = *proposal;
    int halvings = 0;
    std::optional<PdsMatrix> v_new = try_pds(s.evaluate(theta_new));
    while (!v_new) {
      if (++halvings > 30) {
        throw NotPositiveDefinite("fit: V(theta) left the positive definite cone after 30 step halvings");
      }
      theta_new.values = 0.5 * (theta_new.values + theta.values);
      v_new = try_pds(s.evaluate(theta_new));
    }
    res.diagnostics.halvings += halvings;
    const double change = std::max(rel_change(beta_new, beta), rel_change(theta_new.values, theta.values));
    beta = beta_new;
    theta = theta_new;
    v = *v_new;
    d = distances(data, beta, v);
    res.iterations = it + 1;
    res.diagnostics.last_change = change;
    small_step = change <= options.tolerance;
    if (small_step) {
      const double psi = psi_residual(data, beta, theta, s, t).norm();
      if (psi <= 1e-6 * (1.0 + theta.values.norm())) {
        res.converged = true;
        break;
      }
    }
  }

  res.beta = beta;
  res.theta = theta;
  res.distances = distances(data, beta, v);
  res.pds_valid = s.is_valid(theta);
  res.psi_norm = psi_residual(data, beta, theta, s, t).norm();
  if (res.diagnostics.message.empty()) {
    if (res.converged) {
      res.diagnostics.message = "converged";
    } else if (small_step) {
      res.diagnostics.message = "parameter change below tolerance but estimating equations not solved";
    } else {
      res.diagnostics.message = "iteration limit reached";
    }
  }
  return res;
}

nlohmann::json to_json(const FitResult& r) {
  nlohmann::json j;
  j["beta"] = std::vector<double>(r.beta.data(), r.beta.data() + r.beta.size());
  j["theta"] = std::vector<double>(r.theta.values.data(), r.theta.values.data() + r.theta.size());
  j["distances"] = r.distances;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["pds_valid"] = r.pds_valid;
  j["psi_norm"] = r.psi_norm;
  j["diagnostics"] = {{"last_change", r.diagnostics.last_change},
                      {"halvings", r.diagnostics.halvings},
                      {"init", r.diagnostics.init},
                      {"message", r.diagnostics.message},
                      {"solution", "local"}};
  return j;
}

}  // namespace structcov
