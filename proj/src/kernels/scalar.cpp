#include <cmath>

#include "structcov/kernels.hpp"

namespace structcov::kernels::scalar {

void biweight_eval(std::span<const double> s, double c, const BiweightColumns& out) {
  const double inv_c2 = 1.0 / (c * c);
  const double top = c * c / 6.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = s[i];
    if (x <= c) {
      const double t2 = x * x * inv_c2;
      const double u = 1.0 - t2;
      out.rho[i] = x * x * (0.5 + t2 * (t2 * (1.0 / 6.0) - 0.5));
      out.psi_over_s[i] = u * u;
      out.psi[i] = x * u * u;
      out.dpsi[i] = u * (1.0 - 5.0 * t2);
      out.d_psi_over_s[i] = -4.0 * x * u * inv_c2;
    } else {
      out.rho[i] = top;
      out.psi_over_s[i] = 0.0;
      out.psi[i] = 0.0;
      out.dpsi[i] = 0.0;
      out.d_psi_over_s[i] = 0.0;
    }
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace structcov::kernels::scalar
