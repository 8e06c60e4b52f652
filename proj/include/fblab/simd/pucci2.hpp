#pragma once

#include <algorithm>
#include <cmath>

namespace fblab::simd {

enum class PucciSign : int { Plus = 0, Minus = 1 };

struct Pucci2 {
  double value;
  double a11, a12, a22;  // linearization coefficients
};

// Closed-form Pucci value and linearization for a 2x2 symmetric matrix
// [[hxx, hxy], [hxy, hyy]]. The linearization is w_lo*I + (w_hi - w_lo)*P_hi
// where P_hi = (M - e_lo I) / (e_hi - e_lo) projects on the top eigenvector.
// Eigenvalues within tie_tolerance of zero get the lambda1 weight.
// The AVX2 kernel mirrors this operation order exactly.
inline Pucci2 pucci2(PucciSign sign, double lambda0, double lambda1, double hxx, double hxy,
                     double hyy) {
  const double half_gap = 0.5 * (hxx - hyy);
  const double mean = 0.5 * (hxx + hyy);
  const double r = std::sqrt(half_gap * half_gap + hxy * hxy);
  const double e_hi = mean + r;
  const double e_lo = mean - r;
  const double tol = 1e-9 * (1.0 + std::max(std::max(std::abs(hxx), std::abs(hxy)), std::abs(hyy)));

  double v_hi, v_lo, w_hi, w_lo;
  if (sign == PucciSign::Plus) {
    v_hi = e_hi > 0.0 ? lambda1 : lambda0;
    v_lo = e_lo > 0.0 ? lambda1 : lambda0;
    w_hi = e_hi < -tol ? lambda0 : lambda1;
    w_lo = e_lo < -tol ? lambda0 : lambda1;
  } else {
    v_hi = e_hi > 0.0 ? lambda0 : lambda1;
    v_lo = e_lo > 0.0 ? lambda0 : lambda1;
    w_hi = e_hi > tol ? lambda0 : lambda1;
    w_lo = e_lo > tol ? lambda0 : lambda1;
  }
  const double inv2r = r > 0.0 ? 0.5 / r : 0.0;
  const double dw = w_hi - w_lo;
  Pucci2 out;
  out.value = v_hi * e_hi + v_lo * e_lo;
  out.a11 = w_lo + dw * ((half_gap + r) * inv2r);
  out.a12 = dw * (hxy * inv2r);
  out.a22 = w_lo + dw * ((r - half_gap) * inv2r);
  return out;
}

}  // namespace fblab::simd
