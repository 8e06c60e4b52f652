#include "fblab/stencil_solver.hpp"

#include <cmath>

namespace fblab {

StencilSystem::StencilSystem(const HalfDiskGrid& grid)
    : nx_(grid.nx()), ny_(grid.ny()), inv_h2_(1.0 / (grid.h() * grid.h())) {
  cd_.assign(grid.size(), 1.0);
  cxx_.assign(grid.size(), 0.0);
  cyy_.assign(grid.size(), 0.0);
  cxy_.assign(grid.size(), 0.0);
}

void StencilSystem::set_pde_row(std::size_t id, double a11, double a12, double a22) {
  cd_[id] = 0.0;
  cxx_[id] = a11 * inv_h2_;
  cyy_[id] = a22 * inv_h2_;
  cxy_[id] = 0.5 * a12 * inv_h2_;
}

void StencilSystem::set_identity_row(std::size_t id) {
  cd_[id] = 1.0;
  cxx_[id] = cyy_[id] = cxy_[id] = 0.0;
}

void StencilSystem::apply(const std::vector<double>& u, std::vector<double>& y) const {
  y.resize(size());
  simd::kernels().stencil_apply(nx_, ny_, coeffs(), u.data(), y.data());
}

LinearSolveResult solve_linear(const StencilSystem& sys, const std::vector<double>& rhs, std::vector<double>& x,
                               double rel_tol, int max_iters) {
  const auto& k = simd::kernels();
  const std::size_t n = sys.size();
  if (max_iters <= 0) max_iters = static_cast<int>(std::max<std::size_t>(1000, 4 * n));
  x.resize(n, 0.0);

  // Row scaling by the inverse diagonal.
  StencilSystem scaled = sys;
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = sys.cd_[i] - 2.0 * (sys.cxx_[i] + sys.cyy_[i]);
    const double inv = 1.0 / d;
    scaled.cd_[i] *= inv;
    scaled.cxx_[i] *= inv;
    scaled.cyy_[i] *= inv;
    scaled.cxy_[i] *= inv;
    b[i] = rhs[i] * inv;
  }
  const auto c = scaled.coeffs();
  auto matvec = [&](const std::vector<double>& v, std::vector<double>& out) {
    k.stencil_apply(sys.nx_, sys.ny_, c, v.data(), out.data());
  };

  LinearSolveResult res;
  const double bnorm = std::sqrt(k.dot(n, b.data(), b.data()));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }

  std::vector<double> r(n), r_hat(n), p(n, 0.0), v(n, 0.0), s(n), t(n);
  matvec(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  r_hat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  double rnorm = std::sqrt(k.dot(n, r.data(), r.data()));

  for (int it = 0; it < max_iters; ++it) {
    if (rnorm <= rel_tol * bnorm) {
      res.converged = true;
      break;
    }
    res.iterations = it + 1;
    const double rho_new = k.dot(n, r_hat.data(), r.data());
    if (std::abs(rho_new) < 1e-30 * rnorm * rnorm || omega == 0.0) {
      // Breakdown: restart the shadow residual.
      r_hat = r;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      rho = alpha = omega = 1.0;
      ++res.restarts;
      continue;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    // p = r + beta (p - omega v)
    k.axpy(n, -omega, v.data(), p.data());
    k.xpby(n, r.data(), beta, p.data());
    matvec(p, v);
    const double rv = k.dot(n, r_hat.data(), v.data());
    if (rv == 0.0) {
      omega = 0.0;
      continue;
    }
    alpha = rho / rv;
    s = r;
    k.axpy(n, -alpha, v.data(), s.data());
    const double snorm = std::sqrt(k.dot(n, s.data(), s.data()));
    if (snorm <= rel_tol * bnorm) {
      k.axpy(n, alpha, p.data(), x.data());
      rnorm = snorm;
      res.converged = true;
      break;
    }
    matvec(s, t);
    const double tt = k.dot(n, t.data(), t.data());
    omega = tt > 0.0 ? k.dot(n, t.data(), s.data()) / tt : 0.0;
    k.axpy(n, alpha, p.data(), x.data());
    k.axpy(n, omega, s.data(), x.data());
    r = s;
    k.axpy(n, -omega, t.data(), r.data());
    rnorm = std::sqrt(k.dot(n, r.data(), r.data()));
  }

  // Report the true residual of the unscaled system.
  std::vector<double> check(n);
  sys.apply(x, check);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (rhs[i] - check[i]) * (rhs[i] - check[i]);
    den += rhs[i] * rhs[i];
  }
  res.relative_residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  if (!res.converged) res.converged = rnorm <= rel_tol * bnorm;
  return res;
}

}  // namespace fblab
