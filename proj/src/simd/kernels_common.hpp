#pragma once

#include "fblab/simd/kernels.hpp"

namespace fblab::simd::detail {

// Internal linkage: this header is also compiled with -mavx2, and those
// copies must not be merged with the baseline ones.
namespace {

inline void stencil_frame(int nx, int ny, const StencilCoeffs& c, const double* u, double* y) {
  const std::size_t s = static_cast<std::size_t>(nx);
  for (int i = 0; i < nx; ++i) {
    y[i] = c.cd[i] * u[i];
    const std::size_t top = (static_cast<std::size_t>(ny) - 1) * s + i;
    y[top] = c.cd[top] * u[top];
  }
  for (int j = 1; j < ny - 1; ++j) {
    const std::size_t left = static_cast<std::size_t>(j) * s;
    const std::size_t right = left + s - 1;
    y[left] = c.cd[left] * u[left];
    y[right] = c.cd[right] * u[right];
  }
}

inline double stencil_point(const StencilCoeffs& c, const double* u, std::size_t k, std::size_t s) {
  const double uc = u[k];
  double t = c.cd[k] * uc;
  t = t + c.cxx[k] * ((u[k + 1] + u[k - 1]) - (uc + uc));
  t = t + c.cyy[k] * ((u[k + s] + u[k - s]) - (uc + uc));
  t = t + c.cxy[k] * ((u[k + s + 1] - u[k + s - 1]) - (u[k - s + 1] - u[k - s - 1]));
  return t;
}

}  // namespace

}  // namespace fblab::simd::detail
