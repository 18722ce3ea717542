#include "structcov/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "structcov/asymptotics.hpp"
#include "structcov/estimators.hpp"
#include "structcov/influence.hpp"
#include "structcov/simulate.hpp"
#include "structcov/tradeoff.hpp"

namespace structcov {

namespace {

using nlohmann::json;

constexpr int kOk = 0, kFailure = 1, kUsage = 2, kNotConverged = 3, kBreach = 4;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string f3(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

std::string schema(const std::string& verb) { return "structcov." + verb + ".v1"; }

json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct Common {
  std::string format = "csv";
  bool quiet = false;
  unsigned threads = 0;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_format) {
  c.format = default_format;
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--quiet", c.quiet, "Suppress the invocation echo on stderr");
  sub->add_option("--threads", c.threads, "Worker threads (0: STRUCTCOV_THREADS or hardware count)");
}

// One line with every option of the subcommand, given or defaulted.
void echo(const CLI::App* sub, std::ostream& err) {
  std::ostringstream line;
  line << "# structcov " << sub->get_name();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name == "-h,--help" || name == "--help") continue;
    const std::string lname = opt->get_lnames().empty() ? name : "--" + opt->get_lnames().front();
    if (opt->count() > 0) {
      if (opt->get_type_size() == 0) {
        line << ' ' << lname;
        continue;
      }
      line << ' ' << lname << ' ';
      const auto& res = opt->results();
      for (std::size_t i = 0; i < res.size(); ++i) line << (i ? "," : "") << res[i];
    } else if (!opt->get_default_str().empty() && opt->get_type_size() != 0) {
      std::string d = opt->get_default_str();
      if (d.size() >= 2 && d.front() == '[' && d.back() == ']') d = d.substr(1, d.size() - 2);
      line << ' ' << lname << ' ' << d;
    }
  }
  err << line.str() << '\n';
}

LinearStructure resolve_structure(const std::string& descriptor, int k) {
  const bool is_json = descriptor.size() > 5 && descriptor.compare(descriptor.size() - 5, 5, ".json") == 0;
  if (is_json || std::filesystem::exists(descriptor)) return load_structure(descriptor);
  return make_structure(json{{"kind", descriptor}, {"dim", k}});
}

struct RhoChoice {
  std::string family = "s-rho";
  std::optional<double> cutoff;
  std::optional<double> breakdown;

  void add(CLI::App* sub, const std::string& default_family) {
    family = default_family;
    sub->add_option("--family", family, "Weight family")->check(CLI::IsMember({"gaussian-ml", "s-rho"}));
    auto* c = sub->add_option("--cutoff", cutoff, "Biweight cutoff c");
    sub->add_option("--breakdown", breakdown, "Breakdown point in (0, 0.5]; resolved to a cutoff")->excludes(c);
  }

  bool robust() const { return parse_family(family) == Family::s_rho; }

  /// Cutoff for dimension k; throws Usage when neither flag is given.
  double resolve(int k) const {
    if (cutoff) {
      if (!(*cutoff > 0.0)) throw Usage("--cutoff must be positive");
      return *cutoff;
    }
    if (breakdown) return cutoff_for_breakdown(k, *breakdown);
    throw Usage("family s-rho needs --cutoff or --breakdown");
  }

  WeightTriple triple(int k, std::optional<double>& c_out, std::optional<double>& b0_out) const {
    if (!robust()) return gaussian_ml_triple(k);
    const double c = resolve(k);
    const RhoFunction rho = with_consistency(biweight(c), k);
    c_out = c;
    b0_out = rho.b0;
    return s_rho_triple(rho, k);
  }
};

void emit_csv(std::ostream& out, const std::string& verb, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
  out << "# schema: " << schema(verb) << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
}

// ---- cutoff ----------------------------------------------------------------

struct CutoffCmd {
  Common common;
  std::vector<int> dims{1, 2, 5, 10};
  std::vector<double> eps{0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50};

  void setup(CLI::App* sub) {
    sub->add_option("--dim", dims, "Dimensions k")->delimiter(',')->check(CLI::PositiveNumber);
    sub->add_option("--breakdown", eps, "Breakdown points")->delimiter(',');
    add_common(sub, common, "csv");
  }

  int run(std::ostream& out) const {
    for (double e : eps)
      if (!(e > 0.0 && e <= 0.5)) throw Usage("breakdown points must lie in (0, 0.5], got " + std::to_string(e));
    json rows = json::array();
    std::vector<std::vector<std::string>> csv;
    for (int k : dims) {
      for (double e : eps) {
        const double c = cutoff_for_breakdown(k, e);
        rows.push_back({{"k", k}, {"breakdown", e}, {"c", c}});
        csv.push_back({std::to_string(k), f3(e), f3(c)});
      }
    }
    if (common.format == "json") {
      out << json{{"schema", schema("cutoff")}, {"rows", rows}}.dump(2) << '\n';
    } else {
      emit_csv(out, "cutoff", {"k", "breakdown", "c"}, csv);
    }
    return kOk;
  }
};

// ---- scalars ---------------------------------------------------------------

struct ScalarsCmd {
  Common common;
  RhoChoice rho;
  std::vector<int> dims{2};

  void setup(CLI::App* sub) {
    sub->add_option("--dim", dims, "Dimensions k")->delimiter(',')->check(CLI::PositiveNumber);
    rho.add(sub, "s-rho");
    add_common(sub, common, "csv");
  }

  int run(std::ostream& out) const {
    json rows = json::array();
    std::vector<std::vector<std::string>> csv;
    for (int k : dims) {
      const AsymptoticScalars a = rho.robust() ? biweight_scalars(k, rho.resolve(k)) : gaussian_ml_scalars(k);
      json r{{"k", k},
             {"family", std::string(family_name(a.family))},
             {"c", a.cutoff ? json(*a.cutoff) : json(nullptr)},
             {"breakdown", a.breakdown},
             {"b0", a.b0},
             {"sigma1", a.sigma1},
             {"sigma2", a.sigma2},
             {"sigma3", a.sigma3},
             {"lambda", a.lambda},
             {"alpha", a.alpha},
             {"gamma1", a.gamma1},
             {"gamma2", a.gamma2},
             {"delta1", a.delta1},
             {"delta2", a.delta2},
             {"are_regression", a.are_regression()},
             {"are_shape_direction", a.are_shape()},
             {"are_scale", a.are_scale()}};
      rows.push_back(r);
      csv.push_back({std::to_string(k), std::string(family_name(a.family)), a.cutoff ? f3(*a.cutoff) : "",
                     f3(a.breakdown), f3(a.b0), f3(a.sigma1), f3(a.sigma2), f3(a.sigma3), f3(a.lambda), f3(a.alpha),
                     f3(a.gamma1), f3(a.gamma2), f3(a.delta1), f3(a.delta2), f3(a.are_regression()),
                     f3(a.are_shape()), f3(a.are_scale())});
    }
    if (common.format == "json") {
      out << json{{"schema", schema("scalars")}, {"rows", rows}}.dump(2) << '\n';
    } else {
      emit_csv(out, "scalars",
               {"k", "family", "c", "breakdown", "b0", "sigma1", "sigma2", "sigma3", "lambda", "alpha", "gamma1",
                "gamma2", "delta1", "delta2", "are_regression", "are_shape_direction", "are_scale"},
               csv);
    }
    return kOk;
  }
};

// ---- tradeoff --------------------------------------------------------------

json row_json(const TradeoffRow& r) {
  return {{"k", r.k},
          {"breakdown", r.breakdown},
          {"c", r.c},
          {"are_regression", r.are_regression},
          {"are_shape_direction", r.are_shape_direction},
          {"are_scale", r.are_scale},
          {"g1", r.g1},
          {"g2", r.g2},
          {"g3", r.g3}};
}

std::vector<std::string> row_csv(const TradeoffRow& r) {
  return {std::to_string(r.k), f3(r.breakdown), f3(r.c), f3(r.are_regression), f3(r.are_shape_direction),
          f3(r.are_scale), f3(r.g1), f3(r.g2), f3(r.g3)};
}

const std::vector<std::string> kTradeoffHeader{"k",  "breakdown", "c",  "are_regression", "are_shape_direction",
                                                "are_scale", "g1", "g2", "g3"};

struct TradeoffCmd {
  Common common;
  std::vector<int> dims{2, 5, 10};
  std::string grid = "0.05:0.50:0.01";
  std::string out_path;
  std::string summary_path;

  void setup(CLI::App* sub) {
    sub->add_option("--dim", dims, "Dimensions k")->delimiter(',')->check(CLI::PositiveNumber);
    sub->add_option("--grid", grid, "Breakdown grid start:stop:step");
    sub->add_option("--out", out_path, "Write the curve CSV here");
    sub->add_option("--summary", summary_path, "Summary JSON path (default: next to --out)");
    add_common(sub, common, "csv");
  }

  std::vector<double> parse_grid() const {
    double a = 0.0, b = 0.0, h = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream in(grid);
    if (!(in >> a >> c1 >> b >> c2 >> h) || c1 != ':' || c2 != ':' || !in.eof()) {
      throw Usage("--grid must look like start:stop:step, got '" + grid + "'");
    }
    try {
      return breakdown_grid(a, b, h);
    } catch (const InvalidArgument& e) {
      throw Usage(e.what());
    }
  }

  json summary_json(const TradeoffCurve& curve) const {
    json s = json::array();
    for (const auto& ks : curve.summary) {
      json mins = json::object();
      for (const auto& m : ks.argmins) {
        json r = row_json(m.at);
        r["at_boundary"] = m.at_boundary;
        mins[m.index] = r;
      }
      s.push_back({{"k", ks.k}, {"argmin", mins}});
    }
    return s;
  }

  int run(std::ostream& out) const {
    const std::vector<double> eps = parse_grid();
    const TradeoffCurve curve = tradeoff(dims, eps, common.threads);
    std::vector<std::vector<std::string>> csv;
    json rows = json::array();
    for (const auto& r : curve.rows) {
      csv.push_back(row_csv(r));
      rows.push_back(row_json(r));
    }
    const json summary{{"schema", schema("tradeoff-summary")}, {"grid", grid}, {"summary", summary_json(curve)}};

    if (!out_path.empty()) {
      std::ofstream f(out_path);
      if (!f) throw Usage("cannot write '" + out_path + "'");
      emit_csv(f, "tradeoff", kTradeoffHeader, csv);
      std::string sp = summary_path;
      if (sp.empty()) {
        sp = out_path;
        if (sp.size() > 4 && sp.compare(sp.size() - 4, 4, ".csv") == 0) sp.resize(sp.size() - 4);
        sp += ".summary.json";
      }
      std::ofstream fs(sp);
      if (!fs) throw Usage("cannot write '" + sp + "'");
      fs << summary.dump(2) << '\n';
      if (common.format == "json") {
        out << summary.dump(2) << '\n';
      } else {
        std::vector<std::vector<std::string>> srows;
        for (const auto& ks : curve.summary)
          for (const auto& m : ks.argmins) {
            auto r = row_csv(m.at);
            r.insert(r.begin() + 1, m.index);
            srows.push_back(r);
          }
        auto header = kTradeoffHeader;
        header.insert(header.begin() + 1, "argmin_of");
        emit_csv(out, "tradeoff-summary", header, srows);
      }
      return kOk;
    }
    if (!summary_path.empty()) {
      std::ofstream fs(summary_path);
      if (!fs) throw Usage("cannot write '" + summary_path + "'");
      fs << summary.dump(2) << '\n';
    }
    if (common.format == "json") {
      out << json{{"schema", schema("tradeoff")}, {"rows", rows}, {"summary", summary["summary"]}}.dump(2) << '\n';
    } else {
      emit_csv(out, "tradeoff", kTradeoffHeader, csv);
    }
    return kOk;
  }
};

// ---- influence -------------------------------------------------------------

struct InfluenceCmd {
  Common common;
  RhoChoice rho;
  int k = 2;
  std::string structure = "unstructured";
  std::vector<double> theta;
  std::vector<double> y;
  std::vector<double> mu;

  void setup(CLI::App* sub) {
    sub->add_option("--dim", k, "Dimension k")->check(CLI::PositiveNumber);
    rho.add(sub, "s-rho");
    sub->add_option("--structure", structure, "Structure kind or descriptor JSON path");
    sub->add_option("--theta", theta, "theta0 (default: coordinates of the identity)")->delimiter(',');
    sub->add_option("--y", y, "Contamination point")->delimiter(',')->required();
    sub->add_option("--mu", mu, "Centre (default: origin)")->delimiter(',');
    add_common(sub, common, "json");
  }

  int run(std::ostream& out) const {
    const LinearStructure s = resolve_structure(structure, k);
    const int kk = s.dim();
    const ThetaVector th{theta.empty() ? s.coordinates(SymMatrix::identity(kk)).values : to_vector(theta)};
    if (th.size() != s.nparams()) throw Usage("--theta needs " + std::to_string(s.nparams()) + " values");
    if (static_cast<int>(y.size()) != kk) throw Usage("--y needs " + std::to_string(kk) + " values");
    const Vector m = mu.empty() ? Vector::Zero(kk) : to_vector(mu);
    if (m.size() != kk) throw Usage("--mu needs " + std::to_string(kk) + " values");
    const Vector yy = to_vector(y);

    json j{{"schema", schema("influence")}, {"family", rho.family}, {"k", kk}, {"structure", describe(s)}};
    InfluenceWeights w;
    if (rho.robust()) {
      const double c = rho.resolve(kk);
      const RhoFunction f = biweight(c);
      w = influence_weights(f, kk, consistency_constant(f, kk));
      const GesIndices g = ges_indices(kk, c);
      j["c"] = c;
      j["ges"] = {{"g1", g.g1}, {"g2", g.g2}, {"g3", g.g3}};
    } else {
      w = gaussian_ml_influence(kk);
    }
    const StructuredInfluence si = if_structured(yy, m, s, th, w);
    const double d = si.distance;
    j["distance"] = d;
    j["alpha_c"] = w.alpha_c(d);
    j["beta_c"] = w.beta_c(d);
    j["gamma_c"] = w.gamma_c(d);
    j["if_vecM"] = vec_json(si.vec_m);
    j["if_theta"] = vec_json(si.theta);
    for (auto t : {HomogeneousTarget::shape, HomogeneousTarget::direction, HomogeneousTarget::scale,
                   HomogeneousTarget::det_direction}) {
      j["if_" + std::string(target_name(t))] = vec_json(if_homogeneous(yy, m, s, th, w, t));
    }
    if (common.format == "json") {
      out << j.dump(2) << '\n';
      return kOk;
    }
    std::vector<std::vector<std::string>> rows;
    for (const char* key : {"distance", "alpha_c", "beta_c", "gamma_c"})
      rows.push_back({key, "", f3(j[key].get<double>())});
    for (const auto& [key, val] : j.items()) {
      if (key.rfind("if_", 0) != 0) continue;
      for (std::size_t i = 0; i < val.size(); ++i) rows.push_back({key, std::to_string(i + 1), f3(val[i].get<double>())});
    }
    if (j.contains("ges"))
      for (const char* key : {"g1", "g2", "g3"}) rows.push_back({key, "", f3(j["ges"][key].get<double>())});
    emit_csv(out, "influence", {"quantity", "index", "value"}, rows);
    return kOk;
  }
};

// ---- fit -------------------------------------------------------------------

struct FitCmd {
  Common common;
  RhoChoice rho;
  std::string data;
  std::string structure;
  int max_iter = 500;
  double tol = 1e-9;

  void setup(CLI::App* sub) {
    sub->add_option("--data", data, "Dataset CSV or JSON")->required();
    sub->add_option("--structure", structure, "Structure descriptor JSON path or kind")->required();
    rho.add(sub, "gaussian-ml");
    sub->add_option("--max-iter", max_iter, "Iteration limit")->check(CLI::NonNegativeNumber);
    sub->add_option("--tol", tol, "Relative parameter change tolerance")->check(CLI::PositiveNumber);
    add_common(sub, common, "json");
  }

  int run(std::ostream& out) const {
    const Dataset d = read_dataset(data);
    const LinearStructure s = resolve_structure(structure, d.k);
    if (s.dim() != d.k) throw Usage("structure dimension " + std::to_string(s.dim()) + " differs from data dimension " +
                                    std::to_string(d.k));
    std::optional<double> c, b0;
    const WeightTriple t = rho.triple(d.k, c, b0);
    FitOptions opt;
    opt.max_iterations = max_iter;
    opt.tolerance = tol;
    const FitResult r = fit(d, s, t, opt);

    const Sigmas sig = sigma12(t);
    Vector se = Vector::Constant(s.nparams(), std::nan(""));
    if (r.pds_valid) {
      const LimitCovariances lc = limit_covariances(s, r.theta, sig.sigma1, sig.sigma2);
      se = (lc.cov_theta.diagonal() / static_cast<double>(d.size())).cwiseSqrt();
    }
    json j = to_json(r);
    j["schema"] = schema("fit");
    j["family"] = rho.family;
    j["cutoff"] = c ? json(*c) : json(nullptr);
    j["b0"] = b0 ? json(*b0) : json(nullptr);
    j["n"] = d.size();
    j["structure"] = describe(s);
    j["sigma1"] = sig.sigma1;
    j["sigma2"] = sig.sigma2;
    j["theta_std_errors"] = vec_json(se);
    j["V"] = matrix_to_json(s.evaluate(r.theta).matrix());

    if (common.format == "json") {
      out << j.dump(2) << '\n';
    } else {
      std::vector<std::vector<std::string>> rows;
      for (Eigen::Index i = 0; i < r.beta.size(); ++i) rows.push_back({"beta_" + std::to_string(i + 1), f3(r.beta(i)), ""});
      for (Eigen::Index i = 0; i < r.theta.size(); ++i)
        rows.push_back({"theta_" + std::to_string(i + 1), f3(r.theta(i)), f3(se(i))});
      rows.push_back({"converged", r.converged ? "true" : "false", ""});
      rows.push_back({"iterations", std::to_string(r.iterations), ""});
      emit_csv(out, "fit", {"parameter", "estimate", "std_error"}, rows);
    }
    return r.converged ? kOk : kNotConverged;
  }
};

// ---- simulate --------------------------------------------------------------

struct SimulateCmd {
  Common common;
  RhoChoice rho;
  std::string experiment = "radial";
  std::string structure = "compound-symmetry";
  int k = 3;
  std::vector<double> theta{1.0, 0.5};
  double sigma1 = 1.0, sigma2 = 0.0;
  std::size_t replicates = 0;
  std::uint64_t seed = 1;
  std::size_t n = 500;
  std::vector<double> beta{1.0, -0.5};
  bool location = false;
  std::optional<double> tolerance;
  std::string statistic = "theta";

  void setup(CLI::App* sub) {
    sub->add_option("--experiment", experiment, "radial or limit")->check(CLI::IsMember({"radial", "limit"}));
    sub->add_option("--structure", structure, "Structure kind or descriptor JSON path");
    sub->add_option("--dim", k, "Dimension k")->check(CLI::PositiveNumber);
    sub->add_option("--theta", theta, "theta0")->delimiter(',');
    sub->add_option("--sigma1", sigma1, "Radial law sigma1 (radial)");
    sub->add_option("--sigma2", sigma2, "Radial law sigma2 (radial)");
    sub->add_option("--replicates", replicates, "Replicates (0: 100000 radial, 2000 limit)");
    sub->add_option("--seed", seed, "Seed");
    rho.add(sub, "gaussian-ml");
    sub->add_option("--n", n, "Sample size (limit)")->check(CLI::PositiveNumber);
    sub->add_option("--beta", beta, "beta0 with Gaussian designs (limit)")->delimiter(',');
    sub->add_flag("--location", location, "Location model X_i = I_k, beta0 = 0 (limit)");
    sub->add_option("--tolerance", tolerance, "Relative Frobenius tolerance (default 0.05 radial, 0.10 limit)");
    sub->add_option("--statistic", statistic, "Compared statistic (limit)")->check(CLI::IsMember({"theta", "shape"}));
    add_common(sub, common, "json");
  }

  int finish(std::ostream& out, json j, double err, double tol) const {
    j["schema"] = schema("simulate");
    j["experiment"] = experiment;
    j["tolerance"] = tol;
    j["within_tolerance"] = err <= tol;
    if (common.format == "json") {
      out << j.dump(2) << '\n';
    } else {
      std::vector<std::vector<std::string>> rows;
      for (const auto& [key, val] : j.items())
        if (val.is_number()) rows.push_back({key, val.is_number_float() ? f3(val.get<double>()) : val.dump()});
      rows.push_back({"within_tolerance", err <= tol ? "true" : "false"});
      emit_csv(out, "simulate", {"quantity", "value"}, rows);
    }
    return err <= tol ? kOk : kBreach;
  }

  int run(std::ostream& out) const {
    const LinearStructure s = resolve_structure(structure, k);
    const ThetaVector th{to_vector(theta)};
    if (th.size() != s.nparams()) throw Usage("--theta needs " + std::to_string(s.nparams()) + " values");
    if (experiment == "radial") {
      const RadialProjectionReport r =
          radial_projection_experiment(s, th, sigma1, sigma2, replicates ? replicates : 100000, seed, common.threads);
      return finish(out, to_json(r), r.max_rel_err, tolerance.value_or(0.05));
    }
    std::optional<double> c, b0;
    const WeightTriple t = rho.triple(s.dim(), c, b0);
    EstimatorLimitSetup setup;
    setup.theta0 = th;
    setup.n = n;
    setup.replicates = replicates ? replicates : 2000;
    setup.seed = seed;
    if (location) {
      setup.beta0 = Vector::Zero(s.dim());
      setup.designs.assign(n, Matrix::Identity(s.dim(), s.dim()));
    } else {
      setup.beta0 = to_vector(beta);
      if (setup.beta0.size() == 0) throw Usage("--beta needs at least one value");
    }
    const EstimatorLimitReport r = estimator_limit_experiment(s, t, setup, common.threads);
    json j = to_json(r);
    j["family"] = rho.family;
    j["cutoff"] = c ? json(*c) : json(nullptr);
    j["statistic"] = statistic;
    const double err = statistic == "shape" ? r.rel_frobenius_err_shape : r.rel_frobenius_err;
    return finish(out, j, err, tolerance.value_or(0.10));
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Asymptotics of structured covariance estimators", "structcov"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  CutoffCmd cutoff;
  ScalarsCmd scalars;
  TradeoffCmd trade;
  InfluenceCmd influence;
  FitCmd fitcmd;
  SimulateCmd sim;
  CLI::App* s_cutoff = app.add_subcommand("cutoff", "Biweight cutoff for given breakdown points");
  CLI::App* s_scalars = app.add_subcommand("scalars", "Limiting-variance scalars and efficiencies");
  CLI::App* s_trade = app.add_subcommand("tradeoff", "Efficiency and GES curves over breakdown points");
  CLI::App* s_infl = app.add_subcommand("influence", "Influence functions at a point");
  CLI::App* s_fit = app.add_subcommand("fit", "Fit a structured model to data");
  CLI::App* s_sim = app.add_subcommand("simulate", "Monte Carlo checks");
  cutoff.setup(s_cutoff);
  scalars.setup(s_scalars);
  trade.setup(s_trade);
  influence.setup(s_infl);
  fitcmd.setup(s_fit);
  sim.setup(s_sim);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  const CLI::App* active = app.get_subcommands().front();
  const Common* common = nullptr;
  for (auto [sub, c] : {std::pair{s_cutoff, &cutoff.common}, {s_scalars, &scalars.common}, {s_trade, &trade.common},
                        {s_infl, &influence.common}, {s_fit, &fitcmd.common}, {s_sim, &sim.common}}) {
    if (sub == active) common = c;
  }
  if (!common->quiet) echo(active, err);

  try {
    if (active == s_cutoff) return cutoff.run(out);
    if (active == s_scalars) return scalars.run(out);
    if (active == s_trade) return trade.run(out);
    if (active == s_infl) return influence.run(out);
    if (active == s_fit) return fitcmd.run(out);
    return sim.run(out);
  } catch (const Usage& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidSpec& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidParameters& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace structcov
