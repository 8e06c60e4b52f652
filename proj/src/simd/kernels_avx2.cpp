// AVX2 variants. Every kernel evaluates the same expression tree as the
// scalar reference with separate multiply and add (no FMA), so results are
// bit-identical except for the lane-split summation in dot().
#include <immintrin.h>

#include "fblab/simd/kernels.hpp"
#include "kernels_common.hpp"

namespace fblab::simd {

namespace {

void stencil_apply(int nx, int ny, const StencilCoeffs& c, const double* u, double* y) {
  detail::stencil_frame(nx, ny, c, u, y);
  const std::size_t s = static_cast<std::size_t>(nx);
  for (int j = 1; j < ny - 1; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * s;
    std::size_t k = row + 1;
    const std::size_t end = row + s - 1;
    for (; k + 4 <= end; k += 4) {
      const __m256d uc = _mm256_loadu_pd(u + k);
      const __m256d two_u = _mm256_add_pd(uc, uc);
      __m256d t = _mm256_mul_pd(_mm256_loadu_pd(c.cd + k), uc);
      const __m256d dxx = _mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(u + k + 1), _mm256_loadu_pd(u + k - 1)), two_u);
      t = _mm256_add_pd(t, _mm256_mul_pd(_mm256_loadu_pd(c.cxx + k), dxx));
      const __m256d dyy = _mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(u + k + s), _mm256_loadu_pd(u + k - s)), two_u);
      t = _mm256_add_pd(t, _mm256_mul_pd(_mm256_loadu_pd(c.cyy + k), dyy));
      const __m256d up = _mm256_sub_pd(_mm256_loadu_pd(u + k + s + 1), _mm256_loadu_pd(u + k + s - 1));
      const __m256d dn = _mm256_sub_pd(_mm256_loadu_pd(u + k - s + 1), _mm256_loadu_pd(u + k - s - 1));
      t = _mm256_add_pd(t, _mm256_mul_pd(_mm256_loadu_pd(c.cxy + k), _mm256_sub_pd(up, dn)));
      _mm256_storeu_pd(y + k, t);
    }
    for (; k < end; ++k) y[k] = detail::stencil_point(c, u, k, s);
  }
}

double dot(std::size_t n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void xpby(std::size_t n, const double* x, double b, double* y) {
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(vb, _mm256_loadu_pd(y + i))));
  }
  for (; i < n; ++i) y[i] = x[i] + b * y[i];
}

void hessian(int nx, int ny, double h, const double* u, double* hxx, double* hxy, double* hyy) {
  const double inv_h2 = 1.0 / (h * h);
  const double inv_4h2 = 0.25 * inv_h2;
  const __m256d vh2 = _mm256_set1_pd(inv_h2);
  const __m256d v4h2 = _mm256_set1_pd(inv_4h2);
  const std::size_t s = static_cast<std::size_t>(nx);
  for (int j = 1; j < ny - 1; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * s;
    std::size_t k = row + 1;
    const std::size_t end = row + s - 1;
    for (; k + 4 <= end; k += 4) {
      const __m256d uc = _mm256_loadu_pd(u + k);
      const __m256d two_u = _mm256_add_pd(uc, uc);
      const __m256d xx = _mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(u + k + 1), _mm256_loadu_pd(u + k - 1)), two_u);
      const __m256d yy = _mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(u + k + s), _mm256_loadu_pd(u + k - s)), two_u);
      const __m256d up = _mm256_sub_pd(_mm256_loadu_pd(u + k + s + 1), _mm256_loadu_pd(u + k + s - 1));
      const __m256d dn = _mm256_sub_pd(_mm256_loadu_pd(u + k - s + 1), _mm256_loadu_pd(u + k - s - 1));
      _mm256_storeu_pd(hxx + k, _mm256_mul_pd(xx, vh2));
      _mm256_storeu_pd(hyy + k, _mm256_mul_pd(yy, vh2));
      _mm256_storeu_pd(hxy + k, _mm256_mul_pd(_mm256_sub_pd(up, dn), v4h2));
    }
    for (; k < end; ++k) {
      hxx[k] = ((u[k + 1] + u[k - 1]) - (u[k] + u[k])) * inv_h2;
      hyy[k] = ((u[k + s] + u[k - s]) - (u[k] + u[k])) * inv_h2;
      hxy[k] = ((u[k + s + 1] - u[k + s - 1]) - (u[k - s + 1] - u[k - s - 1])) * inv_4h2;
    }
  }
}

inline __m256d vabs(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

// select(mask, a, b): a where mask is set, b elsewhere
inline __m256d select(__m256d mask, __m256d a, __m256d b) { return _mm256_blendv_pd(b, a, mask); }

void pucci(std::size_t n, PucciSign sign, double lambda0, double lambda1, const double* hxx, const double* hxy,
           const double* hyy, double* value, double* a11, double* a12, double* a22) {
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d tie = _mm256_set1_pd(1e-9);
  const __m256d l0 = _mm256_set1_pd(lambda0);
  const __m256d l1 = _mm256_set1_pd(lambda1);
  const bool plus = sign == PucciSign::Plus;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xx = _mm256_loadu_pd(hxx + i);
    const __m256d xy = _mm256_loadu_pd(hxy + i);
    const __m256d yy = _mm256_loadu_pd(hyy + i);
    const __m256d half_gap = _mm256_mul_pd(half, _mm256_sub_pd(xx, yy));
    const __m256d mean = _mm256_mul_pd(half, _mm256_add_pd(xx, yy));
    const __m256d r = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(half_gap, half_gap), _mm256_mul_pd(xy, xy)));
    const __m256d e_hi = _mm256_add_pd(mean, r);
    const __m256d e_lo = _mm256_sub_pd(mean, r);
    const __m256d tol =
        _mm256_mul_pd(tie, _mm256_add_pd(one, _mm256_max_pd(_mm256_max_pd(vabs(xx), vabs(xy)), vabs(yy))));
    const __m256d neg_tol = _mm256_sub_pd(zero, tol);

    const __m256d hi_pos = _mm256_cmp_pd(e_hi, zero, _CMP_GT_OQ);
    const __m256d lo_pos = _mm256_cmp_pd(e_lo, zero, _CMP_GT_OQ);
    __m256d v_hi, v_lo, w_hi, w_lo;
    if (plus) {
      v_hi = select(hi_pos, l1, l0);
      v_lo = select(lo_pos, l1, l0);
      w_hi = select(_mm256_cmp_pd(e_hi, neg_tol, _CMP_LT_OQ), l0, l1);
      w_lo = select(_mm256_cmp_pd(e_lo, neg_tol, _CMP_LT_OQ), l0, l1);
    } else {
      v_hi = select(hi_pos, l0, l1);
      v_lo = select(lo_pos, l0, l1);
      w_hi = select(_mm256_cmp_pd(e_hi, tol, _CMP_GT_OQ), l0, l1);
      w_lo = select(_mm256_cmp_pd(e_lo, tol, _CMP_GT_OQ), l0, l1);
    }
    const __m256d inv2r = select(_mm256_cmp_pd(r, zero, _CMP_GT_OQ), _mm256_div_pd(half, r), zero);
    const __m256d dw = _mm256_sub_pd(w_hi, w_lo);
    _mm256_storeu_pd(value + i, _mm256_add_pd(_mm256_mul_pd(v_hi, e_hi), _mm256_mul_pd(v_lo, e_lo)));
    _mm256_storeu_pd(a11 + i,
                     _mm256_add_pd(w_lo, _mm256_mul_pd(dw, _mm256_mul_pd(_mm256_add_pd(half_gap, r), inv2r))));
    _mm256_storeu_pd(a12 + i, _mm256_mul_pd(dw, _mm256_mul_pd(xy, inv2r)));
    _mm256_storeu_pd(a22 + i,
                     _mm256_add_pd(w_lo, _mm256_mul_pd(dw, _mm256_mul_pd(_mm256_sub_pd(r, half_gap), inv2r))));
  }
  if (i < n) {
    scalar_kernels().pucci(n - i, sign, lambda0, lambda1, hxx + i, hxy + i, hyy + i, value + i, a11 + i, a12 + i,
                           a22 + i);
  }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2", stencil_apply, dot, axpy, xpby, hessian, pucci};
  return table;
}

}  // namespace fblab::simd
