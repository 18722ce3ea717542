#include "structcov/simulate.hpp"

#include <cmath>
#include <limits>

#include "structcov/asymptotics.hpp"
#include "structcov/parallel.hpp"
#include "structcov/spherical.hpp"

namespace structcov {

namespace {

// Stream indices above this are reserved for design draws.
constexpr std::uint64_t kDesignStream = std::uint64_t{1} << 62;

nlohmann::json row_major(const Matrix& m) { return matrix_to_json(m); }

nlohmann::json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

double rel_frobenius(const Matrix& a, const Matrix& b) {
  const double nb = b.norm();
  if (!(nb > 0.0)) return a.norm() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return (a - b).norm() / nb;
}

Matrix sample_covariance(const Matrix& rows) {
  if (rows.rows() < 2) throw InvalidArgument("sample_covariance: need at least two rows");
  const Vector mean = rows.colwise().mean();
  const Matrix centred = rows.rowwise() - mean.transpose();
  const Matrix cov = centred.transpose() * centred / static_cast<double>(rows.rows() - 1);
  return 0.5 * (cov + cov.transpose());
}

RadialProjectionReport radial_projection_experiment(const LinearStructure& s, const ThetaVector& theta0,
                                                    double sigma1, double sigma2, std::size_t replicates,
                                                    std::uint64_t seed, unsigned threads) {
  const int k = s.dim();
  const int l = s.nparams();
  require_radial_parameters(sigma1, sigma2, k);
  if (replicates < 2) throw InvalidArgument("radial_projection_experiment: need at least two replicates");
  const LimitCovariances theory = limit_covariances(s, theta0, sigma1, sigma2);
  const PdsMatrix sigma(s.evaluate(theta0));
  const Matrix ginv = s.gram_inverse(sigma);

  // tr(L_j Sigma^-1 N Sigma^-1) = <B_j, R> with B_j = Sigma^-1/2 L_j Sigma^-1/2.
  std::vector<Matrix> b(l);
  for (int j = 0; j < l; ++j) b[j] = sigma.inverse_sqrt() * s.basis()[j].matrix() * sigma.inverse_sqrt();

  const double a = sigma1 > 0.0 ? (-1.0 + std::sqrt(std::max(0.0, 1.0 + k * sigma2 / (2.0 * sigma1)))) / k : 0.0;
  const double w_scale = std::sqrt(0.5 * sigma1);
  const SphericalLaw law_k = SphericalLaw::gaussian(k);

  Matrix t_rows(static_cast<Eigen::Index>(replicates), l);
  Matrix m_rows(static_cast<Eigen::Index>(replicates), k * k);
  Matrix r_rows(static_cast<Eigen::Index>(replicates), k * k);
  parallel_for(
      replicates,
      [&](std::size_t rep) {
        const Matrix draw = sample(law_k, static_cast<std::size_t>(k) + 1, seed, rep);
        Matrix r(k, k);
        if (sigma1 > 0.0) {
          const Matrix w = w_scale * (draw.leftCols(k) + draw.leftCols(k).transpose());
          r = w + a * w.trace() * Matrix::Identity(k, k);
        } else {
          r = std::sqrt(sigma2) * draw(0, k) * Matrix::Identity(k, k);
        }
        Vector lt(l);
        for (int j = 0; j < l; ++j) lt(j) = b[j].cwiseProduct(r).sum();
        const Vector t = ginv * lt;
        const Eigen::Index row = static_cast<Eigen::Index>(rep);
        t_rows.row(row) = t.transpose();
        m_rows.row(row) = (s.stacked() * t).transpose();
        r_rows.row(row) = vec(r).transpose();
      },
      threads);

  RadialProjectionReport rep;
  rep.replicates = replicates;
  rep.seed = seed;
  rep.sigma1 = sigma1;
  rep.sigma2 = sigma2;
  const Vector mean_t = t_rows.colwise().mean();
  rep.eta_hat = theta0.values.dot(mean_t) / theta0.values.squaredNorm();
  rep.empirical_cov_t = sample_covariance(t_rows);
  rep.theory_cov_t = theory.cov_theta;
  rep.empirical_cov_vecm = sample_covariance(m_rows);
  rep.theory_cov_vecm = theory.cov_vecV;
  rep.rel_err_t = rel_frobenius(rep.empirical_cov_t, rep.theory_cov_t);
  rep.rel_err_vecm = rel_frobenius(rep.empirical_cov_vecm, rep.theory_cov_vecm);
  rep.max_rel_err = std::max(rep.rel_err_t, rep.rel_err_vecm);

  if (k >= 2) {
    // E[tr(R)^2] = 2k s1 + k^2 s2 and E[tr(R^2)] = k(k+1) s1 + k s2.
    double tr2 = 0.0, trsq = 0.0;
    for (Eigen::Index i = 0; i < r_rows.rows(); ++i) {
      const Matrix r = Eigen::Map<const Matrix>(Vector(r_rows.row(i).transpose()).data(), k, k);
      tr2 += r.trace() * r.trace();
      trsq += r.squaredNorm();
    }
    tr2 /= static_cast<double>(replicates);
    trsq /= static_cast<double>(replicates);
    Eigen::Matrix2d coef;
    coef << 2.0 * k, static_cast<double>(k) * k, k * (k + 1.0), k;
    const Eigen::Vector2d sol = coef.fullPivLu().solve(Eigen::Vector2d(tr2, trsq));
    rep.sigma1_hat = sol(0);
    rep.sigma2_hat = sol(1);
  }
  return rep;
}

std::vector<Matrix> gaussian_designs(int k, int q, std::size_t n, std::uint64_t seed) {
  const SphericalLaw law = SphericalLaw::gaussian(k);
  const Matrix draws = sample(law, n * static_cast<std::size_t>(q), seed, kDesignStream);
  std::vector<Matrix> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = draws.middleCols(static_cast<Eigen::Index>(i) * q, q);
  return out;
}

Dataset simulate_dataset(const LinearStructure& s, const ThetaVector& theta0, const Vector& beta0,
                         const std::vector<Matrix>& designs, std::uint64_t seed, std::uint64_t stream) {
  const int k = s.dim();
  const PdsMatrix sigma(s.evaluate(theta0));
  const Matrix z = sample(SphericalLaw::gaussian(k), designs.size(), seed, stream);
  Dataset d;
  d.k = k;
  d.q = static_cast<int>(beta0.size());
  d.x = designs;
  d.y.resize(designs.size());
  for (std::size_t i = 0; i < designs.size(); ++i) {
    d.y[i] = designs[i] * beta0 + sigma.sqrt() * z.col(static_cast<Eigen::Index>(i));
  }
  return d;
}

EstimatorLimitReport estimator_limit_experiment(const LinearStructure& s, const WeightTriple& t,
                                                const EstimatorLimitSetup& setup, unsigned threads) {
  const int k = s.dim();
  const int l = s.nparams();
  if (setup.theta0.size() != l) throw InvalidArgument("estimator_limit_experiment: theta0 has the wrong length");
  if (setup.replicates < 2) throw InvalidArgument("estimator_limit_experiment: need at least two replicates");
  const int q = static_cast<int>(setup.beta0.size());
  std::vector<Matrix> designs = setup.designs;
  if (designs.empty()) {
    if (setup.n == 0) throw InvalidArgument("estimator_limit_experiment: n must be positive");
    designs = gaussian_designs(k, q, setup.n, setup.seed);
  }
  const std::size_t n = designs.size();
  for (const Matrix& x : designs)
    if (x.rows() != k || x.cols() != q) throw InvalidArgument("estimator_limit_experiment: design shape mismatch");

  const Sigmas sig = sigma12(t);
  const LimitCovariances theory = limit_covariances(s, setup.theta0, sig.sigma1, sig.sigma2);
  const PdsMatrix sigma(s.evaluate(setup.theta0));
  const Vector h0 = shape_map(sigma);
  const double root_n = std::sqrt(static_cast<double>(n));

  Matrix theta_rows(static_cast<Eigen::Index>(setup.replicates), l);
  Matrix shape_rows(static_cast<Eigen::Index>(setup.replicates), k * k);
  std::vector<char> ok(setup.replicates, 0);
  parallel_for(
      setup.replicates,
      [&](std::size_t rep) {
        try {
          const Dataset d = simulate_dataset(s, setup.theta0, setup.beta0, designs, setup.seed, rep);
          const FitResult f = fit(d, s, t, setup.fit);
          if (!f.converged || !f.pds_valid) return;
          const Eigen::Index row = static_cast<Eigen::Index>(rep);
          theta_rows.row(row) = (root_n * (f.theta.values - setup.theta0.values)).transpose();
          shape_rows.row(row) = (root_n * (shape_map(PdsMatrix(s.evaluate(f.theta))) - h0)).transpose();
          ok[rep] = 1;
        } catch (const Error&) {
        }
      },
      threads);

  EstimatorLimitReport out;
  out.n = n;
  out.replicates = setup.replicates;
  out.seed = setup.seed;
  out.sigma1 = sig.sigma1;
  out.sigma2 = sig.sigma2;
  std::vector<Eigen::Index> good;
  for (std::size_t i = 0; i < ok.size(); ++i)
    if (ok[i]) good.push_back(static_cast<Eigen::Index>(i));
  out.failures = setup.replicates - good.size();
  if (out.failures * 100 > setup.replicates) {
    throw ExperimentFailure("estimator_limit_experiment: " + std::to_string(out.failures) + " of " +
                            std::to_string(setup.replicates) + " replicate fits failed");
  }
  const Matrix th = theta_rows(good, Eigen::all);
  const Matrix sh = shape_rows(good, Eigen::all);
  out.mean_theta_error = th.colwise().mean().transpose();
  out.empirical_cov_theta = sample_covariance(th);
  out.theory_cov_theta = theory.cov_theta;
  out.empirical_cov_shape = sample_covariance(sh);
  out.theory_cov_shape = theory.cov_shape;
  out.rel_frobenius_err = rel_frobenius(out.empirical_cov_theta, out.theory_cov_theta);
  out.rel_frobenius_err_shape = rel_frobenius(out.empirical_cov_shape, out.theory_cov_shape);
  return out;
}

nlohmann::json to_json(const RadialProjectionReport& r) {
  nlohmann::json j;
  j["eta_hat"] = r.eta_hat;
  j["sigma1"] = r.sigma1;
  j["sigma2"] = r.sigma2;
  j["sigma1_hat"] = r.sigma1_hat ? nlohmann::json(*r.sigma1_hat) : nlohmann::json(nullptr);
  j["sigma2_hat"] = r.sigma2_hat ? nlohmann::json(*r.sigma2_hat) : nlohmann::json(nullptr);
  j["empirical_cov_t"] = row_major(r.empirical_cov_t);
  j["theory_cov_t"] = row_major(r.theory_cov_t);
  j["empirical_cov_vecm"] = row_major(r.empirical_cov_vecm);
  j["theory_cov_vecm"] = row_major(r.theory_cov_vecm);
  j["rel_err_t"] = r.rel_err_t;
  j["rel_err_vecm"] = r.rel_err_vecm;
  j["max_rel_err"] = r.max_rel_err;
  j["replicates"] = r.replicates;
  j["seed"] = r.seed;
  return j;
}

nlohmann::json to_json(const EstimatorLimitReport& r) {
  nlohmann::json j;
  j["empirical_cov_theta"] = row_major(r.empirical_cov_theta);
  j["theory_cov_theta"] = row_major(r.theory_cov_theta);
  j["empirical_cov_shape"] = row_major(r.empirical_cov_shape);
  j["theory_cov_shape"] = row_major(r.theory_cov_shape);
  j["mean_theta_error"] = vector_json(r.mean_theta_error);
  j["rel_frobenius_err"] = r.rel_frobenius_err;
  j["rel_frobenius_err_shape"] = r.rel_frobenius_err_shape;
  j["sigma1"] = r.sigma1;
  j["sigma2"] = r.sigma2;
  j["failures"] = r.failures;
  j["n"] = r.n;
  j["replicates"] = r.replicates;
  j["seed"] = r.seed;
  return j;
}

}  // namespace structcov
