#include <arm_neon.h>

#include <cmath>

#include "structcov/kernels.hpp"

namespace structcov::kernels::neon {

void biweight_eval(std::span<const double> s, double c, const BiweightColumns& out) {
  const std::size_t n = s.size();
  const float64x2_t cut = vdupq_n_f64(c);
  const float64x2_t inv_c2 = vdupq_n_f64(1.0 / (c * c));
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t half = vdupq_n_f64(0.5);
  const float64x2_t sixth = vdupq_n_f64(1.0 / 6.0);
  const float64x2_t five = vdupq_n_f64(5.0);
  const float64x2_t minus_four = vdupq_n_f64(-4.0);
  const float64x2_t top = vdupq_n_f64(c * c / 6.0);
  const float64x2_t zero = vdupq_n_f64(0.0);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t x = vld1q_f64(&s[i]);
    const uint64x2_t inside = vcleq_f64(x, cut);
    const float64x2_t x2 = vmulq_f64(x, x);
    const float64x2_t t2 = vmulq_f64(x2, inv_c2);
    const float64x2_t u = vsubq_f64(one, t2);
    const float64x2_t u2 = vmulq_f64(u, u);
    const float64x2_t inner = vaddq_f64(half, vmulq_f64(t2, vsubq_f64(vmulq_f64(t2, sixth), half)));
    const float64x2_t rho = vmulq_f64(x2, inner);
    const float64x2_t psi = vmulq_f64(x, u2);
    const float64x2_t dpsi = vmulq_f64(u, vsubq_f64(one, vmulq_f64(five, t2)));
    const float64x2_t dpos = vmulq_f64(vmulq_f64(vmulq_f64(minus_four, x), u), inv_c2);

    vst1q_f64(&out.rho[i], vbslq_f64(inside, rho, top));
    vst1q_f64(&out.psi_over_s[i], vbslq_f64(inside, u2, zero));
    vst1q_f64(&out.psi[i], vbslq_f64(inside, psi, zero));
    vst1q_f64(&out.dpsi[i], vbslq_f64(inside, dpsi, zero));
    vst1q_f64(&out.d_psi_over_s[i], vbslq_f64(inside, dpos, zero));
  }
  if (i < n) {
    const BiweightColumns tail{out.rho.subspan(i), out.psi.subspan(i), out.dpsi.subspan(i),
                               out.psi_over_s.subspan(i), out.d_psi_over_s.subspan(i)};
    scalar::biweight_eval(s.subspan(i), c, tail);
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(&a[i]), vld1q_f64(&b[i]));
    acc1 = vfmaq_f64(acc1, vld1q_f64(&a[i + 2]), vld1q_f64(&b[i + 2]));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double max_abs(std::span<const double> a) {
  const std::size_t n = a.size();
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(&a[i])));
  double best = vmaxvq_f64(m);
  for (; i < n; ++i) best = std::max(best, std::fabs(a[i]));
  return best;
}

}  // namespace structcov::kernels::neon
