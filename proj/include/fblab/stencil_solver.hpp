#pragma once

#include <vector>

#include "fblab/half_disk_grid.hpp"
#include "fblab/simd/kernels.hpp"

namespace fblab {

struct LinearSolveResult {
  int iterations = 0;
  double relative_residual = 0.0;
  int restarts = 0;
  bool converged = false;
};

/// Linear system on the full grid rectangle: PDE rows hold the 9-point
/// discretization of trace(A D^2 u), every other row is the identity.
class StencilSystem {
 public:
  explicit StencilSystem(const HalfDiskGrid& grid);

  void set_pde_row(std::size_t id, double a11, double a12, double a22);
  void set_identity_row(std::size_t id);

  /// y = L u (unscaled).
  void apply(const std::vector<double>& u, std::vector<double>& y) const;

  std::size_t size() const { return cd_.size(); }

 private:
  friend LinearSolveResult solve_linear(const StencilSystem& sys, const std::vector<double>& rhs,
                                               std::vector<double>& x, double rel_tol, int max_iters);
  simd::StencilCoeffs coeffs() const { return {cd_.data(), cxx_.data(), cyy_.data(), cxy_.data()}; }

  int nx_, ny_;
  double inv_h2_;
  std::vector<double> cd_, cxx_, cyy_, cxy_;
};

/// Jacobi-preconditioned BiCGSTAB, restarted on breakdown. `x` holds the
/// initial guess and receives the solution.
LinearSolveResult solve_linear(const StencilSystem& sys, const std::vector<double>& rhs, std::vector<double>& x,
                               double rel_tol = 1e-10, int max_iters = 0);

}  // namespace fblab
