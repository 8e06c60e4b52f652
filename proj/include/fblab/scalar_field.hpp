#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fblab/half_disk_grid.hpp"
#include "fblab/sym_matrix.hpp"

namespace fblab {

struct GradientField {
  GridPtr grid;
  std::vector<double> g1, g2;  // zero at exterior nodes

  Point at(std::size_t id) const { return {g1[id], g2[id]}; }
  double magnitude(std::size_t id) const { return std::hypot(g1[id], g2[id]); }
};

/// 9-point Hessian. Entries are meaningful at interior nodes only; other
/// nodes hold zero.
struct HessianField {
  GridPtr grid;
  std::vector<double> hxx, hxy, hyy;

  SymMatrix at(std::size_t id) const { return SymMatrix::two_by_two(hxx[id], hxy[id], hyy[id]); }
};

/// Grid function on the half disk. Exterior nodes store 0 and are never
/// read by the differential operators. A field may carry an invalid mask
/// (set by rescaling when the source point leaves the domain).
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double fill = 0.0);
  ScalarField(GridPtr grid, std::vector<double> values);

  static ScalarField sample(GridPtr grid, const std::function<double(Point)>& fn);

  const GridPtr& grid_ptr() const { return grid_; }
  const HalfDiskGrid& grid() const { return *grid_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t id) const { return values_[id]; }
  double& operator[](std::size_t id) { return values_[id]; }
  double at(int i, int j) const { return values_[grid_->id(i, j)]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  bool has_invalid() const { return invalid_.has_value(); }
  bool valid(std::size_t id) const { return !grid_->is_exterior(id) && (!invalid_ || !(*invalid_)[id]); }
  void mark_invalid(std::size_t id);

  /// Central differences where both neighbors exist, second-order one-sided
  /// differences otherwise. Throws DomainError when neither stencil fits.
  GradientField gradient() const;
  HessianField hessian() const;

  /// Bilinear interpolation on the containing cell. Throws DomainError for
  /// points outside the closed half disk.
  double interpolate(Point p) const;

  /// Non-exterior node ids with |x - center| < radius.
  std::vector<std::size_t> restrict_to(double radius, Point center = {}) const;

  double max_abs() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
  std::optional<std::vector<bool>> invalid_;
};

}  // namespace fblab
