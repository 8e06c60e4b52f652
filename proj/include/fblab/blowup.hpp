#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fblab/elliptic_operator.hpp"
#include "fblab/scalar_field.hpp"

namespace fblab {

/// Radii r_k = 2^-k, k = 1, 2, ... while r_k >= 8h (at most k_max levels).
std::vector<double> default_radii(const HalfDiskGrid& grid, int k_max = 16);

/// v(x) = u(center + r x) / r^2 on the reference grid. Nodes whose source
/// point leaves the half disk are marked invalid.
ScalarField rescale(const ScalarField& u, double r, GridPtr reference, Point center = {});

/// Reference grid on which rescalings by every radius >= r_min sample source
/// nodes exactly (when n * r_min is an integer).
GridPtr reference_grid_for(const HalfDiskGrid& source, double r_min);

struct QuadraticBlowup {
  double a = 0.0;
  double b = 0.0;
  double residual = 0.0;
  double radius = 0.0;
  std::size_t nodes = 0;
};

/// Least squares of a x1 x2 + b x2^2 over valid interior nodes; residual is
/// the max misfit divided by max(1, max|v|). Throws ValidationError with
/// fewer than 10 nodes.
QuadraticBlowup fit_halfplane_quadratic(const ScalarField& v);

struct MProfile {
  std::vector<std::pair<double, double>> shells;  // (r, max |d1 u| / x2)
  double smallest_shell = 0.0;
  /// value = M + c r fitted over the three smallest shells, clamped at 0.
  double extrapolated = 0.0;
  double extrapolated_raw = 0.0;
  bool has_extrapolation = false;

  double estimate() const { return has_extrapolation ? extrapolated : smallest_shell; }
};

/// Per shell r/2 <= |x - center| <= r, nodes with x2 >= h. Shells below 8h
/// or without nodes are omitted.
MProfile m_profile(const ScalarField& u, const std::vector<double>& shells, Point center = {});

struct BlowupThresholds {
  double fit_accept = 0.05;
  double m_zero_tol = 0.05;
  double a_zero_tol = 0.05;
  double uniq_tol = 0.05;
  double limit_tol = 0.05;
};

enum class Alternative { CaseI, CaseII, Indeterminate };
std::string to_string(Alternative a);

struct Classification {
  Alternative alternative = Alternative::Indeterminate;
  double a = 0.0;  // representative coefficient (last accepted fit)
  double b = 0.0;
  std::size_t accepted = 0;
  std::vector<std::string> diagnostics;
};

Classification classify_blowup(const MProfile& profile, const std::vector<QuadraticBlowup>& fits,
                               const BlowupThresholds& thresholds = {});

struct UniquenessReport {
  std::size_t accepted = 0;
  double spread = 0.0;  // max pairwise distance of (a, b)
  bool consistent = false;
  /// F(D^2 u0) for u0 = a x1 x2 + b x2^2 from the last accepted fit.
  double limit_value = 0.0;
  double limit_target = 1.0;
  bool limit_ok = false;
  std::vector<std::string> diagnostics;
};

UniquenessReport uniqueness_diagnostic(const std::vector<QuadraticBlowup>& fits, const EllipticOperator& op,
                                       const BlowupThresholds& thresholds = {}, double target = 1.0);

struct BlowupConfig {
  Point center{};
  std::vector<double> radii;  // empty: default_radii
  BlowupThresholds thresholds;
};

struct BlowupReport {
  Point center{};
  double gradient_norm = 0.0;
  bool gate_passed = false;
  std::string status;  // ok | refused
  double reference_spacing = 0.0;
  std::vector<QuadraticBlowup> fits;
  MProfile profile;
  Classification classification;
  UniquenessReport uniqueness;
  BlowupThresholds thresholds;
};

/// Full pipeline at a flat-boundary center. Refuses (status "refused") when
/// |grad u(center)| > h.
BlowupReport analyze_blowup(const ScalarField& u, const EllipticOperator& op, const BlowupConfig& cfg = {});

}  // namespace fblab
