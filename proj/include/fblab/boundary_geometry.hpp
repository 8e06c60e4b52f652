#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fblab/fb_solver.hpp"

namespace fblab {

enum class CurveLabel { Gamma, GammaI };

struct BoundaryCurve {
  CurveLabel label = CurveLabel::Gamma;
  std::vector<std::vector<Point>> polylines;

  bool empty() const { return polylines.empty(); }
  std::vector<Point> vertices() const;
  std::size_t vertex_count() const;
};

/// Per-node marching-squares state.
enum class CornerState : std::uint8_t { Out, In, Ignore };

/// Contours the In/Out interface. Cells with an Ignore corner are skipped,
/// crossings sit at edge midpoints, saddles follow the average-corner rule
/// (the cell center counts as In), and segments touching x2 <= h/2 are dropped.
BoundaryCurve contour_states(const HalfDiskGrid& grid, const std::vector<CornerState>& states, CurveLabel label);

/// Gamma: boundary of Omega over interior nodes.
BoundaryCurve extract_gamma(const ActiveSet& active);

/// Gamma_i: boundary of the interior of {|u| <= tol} (nodes whose 3x3
/// neighborhood is zero), contoured against the fixed boundary as well.
BoundaryCurve extract_gamma_i(const ScalarField& u, double tol);

struct ModulusEntry {
  double r;
  double omega;
  bool empty;
};

struct ModulusTable {
  std::vector<ModulusEntry> entries;  // in the order of the requested radii
  double r0 = 0.0;                    // largest radius with data (0 if none)
};

/// omega(r) = sup of x2/|x - center| over vertices with |x - center| <= r.
ModulusTable modulus_table(const BoundaryCurve& curve, const std::vector<double>& radii, Point center = {});

struct ConeClearance {
  bool clear = true;
  std::vector<Point> witnesses;
};

/// Clear iff no vertex lies in B_rho^+(center) with x2 > epsilon |x1 - center.x1|.
ConeClearance cone_clearance(const BoundaryCurve& curve, double epsilon, double rho, Point center = {});

/// min |x - center| over vertices; +infinity for an empty curve.
double gamma_i_clearance(const BoundaryCurve& curve, Point center = {});

struct ComplementMeasure {
  double measure = 0.0;       // h^2 * #(interior nodes in B_s^+ outside Omega)
  std::size_t nodes = 0;
  bool empty_interior = true;  // no such node has its whole 3x3 block outside Omega
};

ComplementMeasure complement_measure(const ActiveSet& active, double s, Point center = {});

void write_curve_csv(const std::string& path, const BoundaryCurve& curve);
void write_modulus_csv(const std::string& path, const ModulusTable& table);

}  // namespace fblab
