#pragma once

// Expectations E[z(|x|)] under spherical laws on R^k, computed as
// one-dimensional integrals against the radial density
//   f(r) = 2 pi^{k/2} / Gamma(k/2) g(r^2) r^{k-1}.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "structcov/foundations.hpp"

namespace structcov {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule (Newton iteration on P_n); results for n <= 64 are cached.
const GaussLegendre& gauss_legendre(int n);

struct QuadratureOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  int max_depth = 40;
  int order = 20;
};

/// Adaptive Gauss-Legendre on [a, b] by bisection. Throws QuadratureFailure
/// when the depth budget runs out.
double integrate(const std::function<double(double)>& f, double a, double b, const QuadratureOptions& opt = {});

class SphericalLaw {
 public:
  /// Standard Gaussian N(0, I_k).
  static SphericalLaw gaussian(int k);

  /// Law with density generator g (the density is g(|x|^2)). Normalization
  /// is verified to 1e-10 at construction.
  static SphericalLaw from_generator(int k, std::function<double(double)> g, std::string name = "custom");

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  bool is_gaussian() const { return gaussian_; }

  double radial_density(double r) const;
  /// Radius beyond which the radial density stays below 1e-16 of its maximum.
  double tail_cutoff() const { return tail_; }

 private:
  SphericalLaw() = default;
  void locate_tail();

  int dim_ = 1;
  std::string name_;
  bool gaussian_ = false;
  std::function<double(double)> log_generator_;
  double log_surface_ = 0.0;  // log(2 pi^{k/2} / Gamma(k/2))
  double tail_ = 0.0;
};

/// E[z(|x|)] by adaptive quadrature with panels split at `kinks`.
double radial_expectation(const SphericalLaw& law, const std::function<double(double)>& z,
                          std::span<const double> kinks = {}, const QuadratureOptions& opt = {});

/// Fixed composite Gauss-Legendre rule whose weights already include the
/// radial density, so E[z] = sum_j weights[j] z(nodes[j]). Panels are split
/// at the kinks and are at most `panel_width` wide.
class RadialRule {
 public:
  static RadialRule build(const SphericalLaw& law, std::span<const double> kinks = {}, double panel_width = 0.75,
                          int order = 24);

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }

  /// sum_j weights[j] values[j] via the dispatched dot kernel.
  double expect(std::span<const double> values) const;
  double expect(const std::function<double(double)>& z) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// n i.i.d. draws as the columns of a k x n matrix. The pair (seed, stream)
/// fully determines the output. Only the Gaussian law can be sampled.
Matrix sample(const SphericalLaw& law, std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace structcov
