#include "fblab/simd/kernels.hpp"

#include "kernels_common.hpp"

namespace fblab::simd {

namespace {

void stencil_apply(int nx, int ny, const StencilCoeffs& c, const double* u, double* y) {
  detail::stencil_frame(nx, ny, c, u, y);
  for (int j = 1; j < ny - 1; ++j) {
    for (int i = 1; i < nx - 1; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * nx + i;
      y[k] = detail::stencil_point(c, u, k, static_cast<std::size_t>(nx));
    }
  }
}

double dot(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void xpby(std::size_t n, const double* x, double b, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

void hessian(int nx, int ny, double h, const double* u, double* hxx, double* hxy, double* hyy) {
  const double inv_h2 = 1.0 / (h * h);
  const double inv_4h2 = 0.25 * inv_h2;
  const std::size_t s = static_cast<std::size_t>(nx);
  for (int j = 1; j < ny - 1; ++j) {
    for (int i = 1; i < nx - 1; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * s + i;
      hxx[k] = ((u[k + 1] + u[k - 1]) - (u[k] + u[k])) * inv_h2;
      hyy[k] = ((u[k + s] + u[k - s]) - (u[k] + u[k])) * inv_h2;
      hxy[k] = ((u[k + s + 1] - u[k + s - 1]) - (u[k - s + 1] - u[k - s - 1])) * inv_4h2;
    }
  }
}

void pucci(std::size_t n, PucciSign sign, double lambda0, double lambda1, const double* hxx, const double* hxy,
           const double* hyy, double* value, double* a11, double* a12, double* a22) {
  for (std::size_t i = 0; i < n; ++i) {
    const Pucci2 p = pucci2(sign, lambda0, lambda1, hxx[i], hxy[i], hyy[i]);
    value[i] = p.value;
    a11[i] = p.a11;
    a12[i] = p.a12;
    a22[i] = p.a22;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", stencil_apply, dot, axpy, xpby, hessian, pucci};
  return table;
}

}  // namespace fblab::simd
