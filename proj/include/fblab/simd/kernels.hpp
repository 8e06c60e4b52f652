#pragma once

#include <cstddef>
#include <string_view>

#include "fblab/simd/pucci2.hpp"

namespace fblab::simd {

// Per-node coefficients of the 9-point operator on an nx-by-ny rectangle:
//   y = cd*u + cxx*((uE + uW) - 2u) + cyy*((uN + uS) - 2u)
//         + cxy*((uNE - uNW) - (uSE - uSW))
// Frame nodes (first/last row and column) only use cd.
struct StencilCoeffs {
  const double* cd;
  const double* cxx;
  const double* cyy;
  const double* cxy;
};

using StencilApplyFn = void (*)(int nx, int ny, const StencilCoeffs& c, const double* u, double* y);
using DotFn = double (*)(std::size_t n, const double* x, const double* y);
// y += a*x
using AxpyFn = void (*)(std::size_t n, double a, const double* x, double* y);
// y = x + b*y
using XpbyFn = void (*)(std::size_t n, const double* x, double b, double* y);
// Central 9-point Hessian on the inner rectangle; frame entries are left untouched.
using HessianFn = void (*)(int nx, int ny, double h, const double* u, double* hxx, double* hxy, double* hyy);
// Batched pucci2() over n matrices.
using PucciBatchFn = void (*)(std::size_t n, PucciSign sign, double lambda0, double lambda1, const double* hxx,
                              const double* hxy, const double* hyy, double* value, double* a11, double* a12,
                              double* a22);

struct KernelTable {
  std::string_view name;
  StencilApplyFn stencil_apply;
  DotFn dot;
  AxpyFn axpy;
  XpbyFn xpby;
  HessianFn hessian;
  PucciBatchFn pucci;
};

const KernelTable& scalar_kernels();
/// nullptr when the build or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// Table chosen once per process: AVX2 when available, unless the
/// environment variable FBLAB_SIMD is set to "scalar".
const KernelTable& kernels();

}  // namespace fblab::simd
