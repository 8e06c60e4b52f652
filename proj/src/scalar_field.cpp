#include "fblab/scalar_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fblab/simd/kernels.hpp"

namespace fblab {

ScalarField::ScalarField(GridPtr grid, double fill) : grid_(std::move(grid)) {
  if (!grid_) throw ValidationError("field needs a grid");
  values_.assign(grid_->size(), 0.0);
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (!grid_->is_exterior(k)) values_[k] = fill;
}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw ValidationError("field needs a grid");
  if (values_.size() != grid_->size()) throw ValidationError("field value count does not match the grid");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (grid_->is_exterior(k)) values_[k] = 0.0;
    else if (!std::isfinite(values_[k])) throw ValidationError("field values must be finite");
  }
}

ScalarField ScalarField::sample(GridPtr grid, const std::function<double(Point)>& fn) {
  ScalarField f(grid);
  for (std::size_t k = 0; k < f.size(); ++k)
    if (!grid->is_exterior(k)) f.values_[k] = fn(grid->point(k));
  return f;
}

void ScalarField::mark_invalid(std::size_t id) {
  if (!invalid_) invalid_.emplace(values_.size(), false);
  (*invalid_)[id] = true;
  values_[id] = 0.0;
}

GradientField ScalarField::gradient() const {
  const auto& g = *grid_;
  GradientField out{grid_, std::vector<double>(size(), 0.0), std::vector<double>(size(), 0.0)};
  const double inv2h = 0.5 / g.h();
  auto usable = [&](int i, int j) { return g.in_range(i, j) && !g.is_exterior(g.id(i, j)); };

  // Derivative along (di, dj) at node (i, j).
  auto directional = [&](int i, int j, int di, int dj) {
    if (usable(i + di, j + dj) && usable(i - di, j - dj)) {
      return (at(i + di, j + dj) - at(i - di, j - dj)) * inv2h;
    }
    for (int s : {1, -1}) {
      if (usable(i + s * di, j + s * dj) && usable(i + 2 * s * di, j + 2 * s * dj)) {
        return s * (-3.0 * at(i, j) + 4.0 * at(i + s * di, j + s * dj) - at(i + 2 * s * di, j + 2 * s * dj)) * inv2h;
      }
    }
    throw DomainError("grid too coarse for a one-sided difference at node (" + std::to_string(i) + ", " +
                      std::to_string(j) + ")");
  };

  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const std::size_t k = g.id(i, j);
      if (g.is_exterior(k)) continue;
      out.g1[k] = directional(i, j, 1, 0);
      out.g2[k] = directional(i, j, 0, 1);
    }
  }
  return out;
}

HessianField ScalarField::hessian() const {
  const auto& g = *grid_;
  HessianField out{grid_, std::vector<double>(size(), 0.0), std::vector<double>(size(), 0.0),
                   std::vector<double>(size(), 0.0)};
  simd::kernels().hessian(g.nx(), g.ny(), g.h(), values_.data(), out.hxx.data(), out.hxy.data(), out.hyy.data());
  for (std::size_t k = 0; k < size(); ++k) {
    if (!g.is_interior(k)) out.hxx[k] = out.hxy[k] = out.hyy[k] = 0.0;
  }
  return out;
}

double ScalarField::interpolate(Point p) const {
  const auto& g = *grid_;
  const double slack = 1e-12;
  if (p.x2 < -slack || p.x1 * p.x1 + p.x2 * p.x2 > 1.0 + slack || !std::isfinite(p.x1) || !std::isfinite(p.x2)) {
    throw DomainError("interpolation point outside the half disk");
  }
  const double s = (p.x1 + 1.0) / g.h();
  const double t = std::max(p.x2, 0.0) / g.h();
  const int i = std::clamp(static_cast<int>(std::floor(s)), 0, g.nx() - 2);
  const int j = std::clamp(static_cast<int>(std::floor(t)), 0, g.ny() - 2);
  const double fx = s - i, fy = t - j;
  return (1.0 - fy) * ((1.0 - fx) * at(i, j) + fx * at(i + 1, j)) + fy * ((1.0 - fx) * at(i, j + 1) + fx * at(i + 1, j + 1));
}

std::vector<std::size_t> ScalarField::restrict_to(double radius, Point center) const {
  std::vector<std::size_t> out;
  if (!(radius > 0.0)) return out;
  const auto& g = *grid_;
  for (std::size_t k = 0; k < size(); ++k) {
    if (g.is_exterior(k)) continue;
    if (norm(g.point(k) - center) < radius) out.push_back(k);
  }
  return out;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (std::size_t k = 0; k < size(); ++k)
    if (valid(k)) m = std::max(m, std::abs(values_[k]));
  return m;
}

}  // namespace fblab
