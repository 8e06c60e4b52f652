#include "fblab/half_disk_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fblab {

HalfDiskGrid::HalfDiskGrid(int n) : n_(n) {
  if (n < 4) throw ValidationError("grid needs at least 4 cells per unit length (got " + std::to_string(n) + ")");
  h_ = 1.0 / n;
  nx_ = 2 * n + 1;
  ny_ = n + 1;
  kinds_.assign(static_cast<std::size_t>(nx_) * ny_, NodeKind::Exterior);

  std::vector<bool> inside(kinds_.size(), false);
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      const Point p = point(i, j);
      inside[id(i, j)] = j == 0 ? std::abs(p.x1) < 1.0 : p.x1 * p.x1 + p.x2 * p.x2 < 1.0;
    }
  }
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      const std::size_t k = id(i, j);
      if (!inside[k]) continue;
      if (j == 0) {
        kinds_[k] = NodeKind::FlatBoundary;
        continue;
      }
      bool all = true;
      for (int dj = -1; dj <= 1 && all; ++dj)
        for (int di = -1; di <= 1; ++di) {
          if (!in_range(i + di, j + dj) || !inside[id(i + di, j + dj)]) {
            all = false;
            break;
          }
        }
      kinds_[k] = all ? NodeKind::Interior : NodeKind::ArcBoundary;
    }
  }
}

std::shared_ptr<const HalfDiskGrid> HalfDiskGrid::from_spacing(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("grid spacing must be positive");
  const double inv = 1.0 / h;
  const double n = std::round(inv);
  if (std::abs(inv - n) > 1e-9 * inv || n < 4) {
    throw ValidationError("grid spacing must be 1/n for an integer n >= 4 (got h=" + std::to_string(h) + ")");
  }
  return make(static_cast<int>(n));
}

std::size_t HalfDiskGrid::count(NodeKind k) const {
  return static_cast<std::size_t>(std::count(kinds_.begin(), kinds_.end(), k));
}

}  // namespace fblab
