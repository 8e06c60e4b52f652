#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fblab/elliptic_operator.hpp"
#include "fblab/scalar_field.hpp"

namespace fblab {

struct QuadraticPolynomial {
  Point center{};
  double value = 0.0;
  Point gradient{};
  SymMatrix hessian = SymMatrix(2);

  double operator()(Point x) const;
};

struct FitConstraint {
  const EllipticOperator* op = nullptr;
  double target = 1.0;
};

struct LocalFit {
  QuadraticPolynomial poly;
  double misfit = 0.0;  // max |u - P| over the fitted nodes
  std::size_t nodes = 0;
};

/// Least-squares quadratic over non-exterior nodes with |x - x0| < r.
/// With a constraint the Hessian moves along A = linearize(op, H) until
/// F(H, x0) = target, then value and gradient are refitted.
/// Throws ValidationError with fewer than 15 nodes.
LocalFit fit_local_quadratic(const ScalarField& u, Point x0, double r,
                             std::optional<FitConstraint> constraint = std::nullopt);

struct DyadicLevel {
  int k = 0;
  double radius = 0.0;
  QuadraticPolynomial poly;
  double misfit = 0.0;
  double scaled_misfit = 0.0;  // misfit / rho^(2k)
  double increment = 0.0;      // |D^2 P_k - D^2 P_{k-1}|, 0 at k = 0
  double hessian_norm = 0.0;   // |D^2 P_k|
  std::size_t nodes = 0;
};

struct DyadicProfile {
  double rho = 0.5;
  std::vector<DyadicLevel> levels;
  double constant = 0.0;      // max scaled misfit
  double max_increment = 0.0;
  /// The scaled misfit on fine levels stays within twice its coarse-level size.
  bool uniform_constant = true;
};

/// Levels k = 0, 1, ... with 8h <= rho^k <= 1 at a flat-boundary x0.
/// Matrix norms are spectral.
DyadicProfile dyadic_profile(const ScalarField& u, Point x0, double rho, const EllipticOperator& op,
                             double target = 1.0);

struct BmoLevel {
  int k = 0;
  double radius = 0.0;  // rho^k / 2
  double value = 0.0;   // mean of |D^2 u - D^2 P_k|_F^2
  std::size_t nodes = 0;
};

struct BmoProfile {
  std::vector<BmoLevel> levels;
  double max_value = 0.0;
};

BmoProfile bmo_profile(const ScalarField& u, Point x0, double rho, const EllipticOperator& op, double target = 1.0);
BmoProfile bmo_profile(const ScalarField& u, const DyadicProfile& dyadic, Point x0);

/// Max spectral norm of the discrete Hessian over interior nodes in
/// B_radius^+(center). Requires radius <= 1 - 2h.
double c11_sup(const ScalarField& u, double radius, Point center = {});

void write_dyadic_csv(const std::string& path, const DyadicProfile& dyadic, const BmoProfile& bmo);

}  // namespace fblab
