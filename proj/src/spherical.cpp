#include "structcov/spherical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>

#include "structcov/error.hpp"
#include "structcov/kernels.hpp"

namespace structcov {

namespace {

GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-15) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

double panel(const std::function<double(double)>& f, double a, double b, const GaussLegendre& rule) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

double adapt(const std::function<double(double)>& f, double a, double b, double whole, double abs_tol,
             const QuadratureOptions& opt, const GaussLegendre& rule, int depth) {
  const double m = 0.5 * (a + b);
  const double left = panel(f, a, m, rule);
  const double right = panel(f, m, b, rule);
  const double both = left + right;
  if (!std::isfinite(both)) {
    throw QuadratureFailure("integrand is not finite on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  if (std::fabs(both - whole) <= std::max(abs_tol, opt.rel_tol * std::fabs(both))) return both;
  if (depth >= opt.max_depth) {
    throw QuadratureFailure("adaptive quadrature did not converge on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "], last change " + std::to_string(std::fabs(both - whole)));
  }
  return adapt(f, a, m, left, 0.5 * abs_tol, opt, rule, depth + 1) +
         adapt(f, m, b, right, 0.5 * abs_tol, opt, rule, depth + 1);
}

// Breakpoints 0 = x_0 < ... < x_m = r_max, split at kinks and at most `width` apart.
std::vector<double> breakpoints(std::span<const double> kinks, double r_max, double width) {
  std::vector<double> cuts{0.0};
  for (double k : kinks)
    if (k > 0.0 && k < r_max) cuts.push_back(k);
  cuts.push_back(r_max);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> out{cuts.front()};
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double a = cuts[i - 1], b = cuts[i];
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
    for (int p = 1; p <= pieces; ++p) out.push_back(p == pieces ? b : a + (b - a) * p / pieces);
  }
  return out;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  if (n < 1 || n > 64) throw InvalidArgument("gauss_legendre: order must be in [1, 64]");
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, const QuadratureOptions& opt) {
  if (b == a) return 0.0;
  const GaussLegendre& rule = gauss_legendre(opt.order);
  return adapt(f, a, b, panel(f, a, b, rule), opt.abs_tol, opt, rule, 0);
}

SphericalLaw SphericalLaw::gaussian(int k) {
  if (k < 1) throw InvalidArgument("SphericalLaw: dimension must be >= 1");
  SphericalLaw law;
  law.dim_ = k;
  law.name_ = "gaussian";
  law.gaussian_ = true;
  const double log_norm = -0.5 * k * std::log(2.0 * std::numbers::pi);
  law.log_generator_ = [log_norm](double t) { return log_norm - 0.5 * t; };
  law.log_surface_ = std::log(2.0) + 0.5 * k * std::log(std::numbers::pi) - std::lgamma(0.5 * k);
  law.locate_tail();
  return law;
}

SphericalLaw SphericalLaw::from_generator(int k, std::function<double(double)> g, std::string name) {
  if (k < 1) throw InvalidArgument("SphericalLaw: dimension must be >= 1");
  if (!g) throw InvalidArgument("SphericalLaw: empty generator");
  SphericalLaw law;
  law.dim_ = k;
  law.name_ = std::move(name);
  law.log_generator_ = [g = std::move(g)](double t) {
    const double v = g(t);
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
  };
  law.log_surface_ = std::log(2.0) + 0.5 * k * std::log(std::numbers::pi) - std::lgamma(0.5 * k);
  law.locate_tail();
  const double mass = radial_expectation(law, [](double) { return 1.0; });
  if (std::fabs(mass - 1.0) > 1e-10) {
    throw InvalidArgument("SphericalLaw '" + law.name_ + "': radial density integrates to " + std::to_string(mass));
  }
  return law;
}

double SphericalLaw::radial_density(double r) const {
  if (r < 0.0) return 0.0;
  if (r == 0.0) return dim_ == 1 ? std::exp(log_surface_ + log_generator_(0.0)) : 0.0;
  return std::exp(log_surface_ + log_generator_(r * r) + (dim_ - 1) * std::log(r));
}

void SphericalLaw::locate_tail() {
  auto log_f = [this](double r) { return log_surface_ + log_generator_(r * r) + (dim_ - 1) * std::log(r); };
  const double drop = std::log(1e-16);
  double best = -std::numeric_limits<double>::infinity();
  double prev = 0.0;
  double r = 0.05;
  while (true) {
    const double v = log_f(r);
    best = std::max(best, v);
    if (std::isfinite(best) && v < best + drop) break;
    prev = r;
    r = r < 10.0 ? r + 0.05 : r * 1.05;
    if (r > 1e8) throw QuadratureFailure("SphericalLaw '" + name_ + "': radial density does not decay");
  }
  double lo = prev, hi = r;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (log_f(mid) < best + drop ? hi : lo) = mid;
  }
  tail_ = hi;
}

double radial_expectation(const SphericalLaw& law, const std::function<double(double)>& z,
                          std::span<const double> kinks, const QuadratureOptions& opt) {
  const double r_max = law.tail_cutoff();
  const std::vector<double> cuts = breakpoints(kinks, r_max, 2.0);
  auto integrand = [&](double r) { return z(r) * law.radial_density(r); };
  double total = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) total += integrate(integrand, cuts[i - 1], cuts[i], opt);
  if (!std::isfinite(total)) throw QuadratureFailure("radial expectation is not finite");
  // Polynomial tails carry mass past r_max; extend outward until the edge is negligible.
  auto edge_at = [&](double r) { return std::fabs(z(r)) * law.radial_density(r) * std::max(1.0, r); };
  double hi = r_max;
  while (!(edge_at(hi) <= 1e-12 * std::max(1.0, std::fabs(total))) && hi < 1e9) {
    total += integrate(integrand, hi, 4.0 * hi, opt);
    hi *= 4.0;
    if (!std::isfinite(total)) throw QuadratureFailure("radial expectation is not finite");
  }
  if (!(edge_at(hi) <= 1e-9 * std::max(1.0, std::fabs(total)))) {
    throw QuadratureFailure("integrand growth exceeds the decay of the '" + law.name() +
                            "' radial density: |z f| at r=" + std::to_string(hi) + " is " +
                            std::to_string(edge_at(hi)));
  }
  return total;
}

RadialRule RadialRule::build(const SphericalLaw& law, std::span<const double> kinks, double panel_width,
                             int order) {
  if (!(panel_width > 0.0)) throw InvalidArgument("RadialRule: panel width must be positive");
  const GaussLegendre& gl = gauss_legendre(order);
  const std::vector<double> cuts = breakpoints(kinks, law.tail_cutoff(), panel_width);
  RadialRule rule;
  rule.nodes_.reserve((cuts.size() - 1) * gl.nodes.size());
  rule.weights_.reserve(rule.nodes_.capacity());
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i - 1] + cuts[i]);
    const double half = 0.5 * (cuts[i] - cuts[i - 1]);
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
      const double r = mid + half * gl.nodes[j];
      rule.nodes_.push_back(r);
      rule.weights_.push_back(half * gl.weights[j] * law.radial_density(r));
    }
  }
  return rule;
}

double RadialRule::expect(std::span<const double> values) const {
  if (values.size() != weights_.size()) throw InvalidArgument("RadialRule::expect: length mismatch");
  return kernels::dot(weights_, values);
}

double RadialRule::expect(const std::function<double(double)>& z) const {
  std::vector<double> v(nodes_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = z(nodes_[i]);
  return expect(v);
}

Matrix sample(const SphericalLaw& law, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  if (!law.is_gaussian()) {
    throw UnsupportedSampler("sampling is only available for the Gaussian law, not '" + law.name() + "'");
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 gen(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(law.dim(), static_cast<Eigen::Index>(n));
  double* p = out.data();
  for (Eigen::Index i = 0; i < out.size(); ++i) p[i] = normal(gen);
  return out;
}

}  // namespace structcov
