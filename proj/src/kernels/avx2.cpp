#include <immintrin.h>

#include <cmath>

#include "structcov/kernels.hpp"

namespace structcov::kernels::avx2 {

void biweight_eval(std::span<const double> s, double c, const BiweightColumns& out) {
  const std::size_t n = s.size();
  const double inv_c2_s = 1.0 / (c * c);
  const __m256d cut = _mm256_set1_pd(c);
  const __m256d inv_c2 = _mm256_set1_pd(inv_c2_s);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d sixth = _mm256_set1_pd(1.0 / 6.0);
  const __m256d five = _mm256_set1_pd(5.0);
  const __m256d minus_four = _mm256_set1_pd(-4.0);
  const __m256d top = _mm256_set1_pd(c * c / 6.0);
  const __m256d zero = _mm256_setzero_pd();

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(&s[i]);
    const __m256d inside = _mm256_cmp_pd(x, cut, _CMP_LE_OQ);
    const __m256d x2 = _mm256_mul_pd(x, x);
    const __m256d t2 = _mm256_mul_pd(x2, inv_c2);
    const __m256d u = _mm256_sub_pd(one, t2);
    const __m256d u2 = _mm256_mul_pd(u, u);

    // x^2 (1/2 + t2 (t2/6 - 1/2)), same association as the scalar path
    const __m256d inner = _mm256_add_pd(half, _mm256_mul_pd(t2, _mm256_sub_pd(_mm256_mul_pd(t2, sixth), half)));
    const __m256d rho = _mm256_mul_pd(x2, inner);
    const __m256d psi = _mm256_mul_pd(x, u2);
    const __m256d dpsi = _mm256_mul_pd(u, _mm256_sub_pd(one, _mm256_mul_pd(five, t2)));
    const __m256d dpos = _mm256_mul_pd(_mm256_mul_pd(_mm256_mul_pd(minus_four, x), u), inv_c2);

    _mm256_storeu_pd(&out.rho[i], _mm256_blendv_pd(top, rho, inside));
    _mm256_storeu_pd(&out.psi_over_s[i], _mm256_blendv_pd(zero, u2, inside));
    _mm256_storeu_pd(&out.psi[i], _mm256_blendv_pd(zero, psi, inside));
    _mm256_storeu_pd(&out.dpsi[i], _mm256_blendv_pd(zero, dpsi, inside));
    _mm256_storeu_pd(&out.d_psi_over_s[i], _mm256_blendv_pd(zero, dpos, inside));
  }
  if (i < n) {
    const BiweightColumns tail{out.rho.subspan(i), out.psi.subspan(i), out.dpsi.subspan(i),
                               out.psi_over_s.subspan(i), out.d_psi_over_s.subspan(i)};
    scalar::biweight_eval(s.subspan(i), c, tail);
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i]), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(&a[i + 4]), _mm256_loadu_pd(&b[i + 4]), acc1);
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i]), acc0);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double max_abs(std::span<const double> a) {
  const std::size_t n = a.size();
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(&a[i])));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double best = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) best = std::max(best, std::fabs(a[i]));
  return best;
}

}  // namespace structcov::kernels::avx2
