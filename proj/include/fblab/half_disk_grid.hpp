#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "fblab/error.hpp"

namespace fblab {

enum class NodeKind : std::uint8_t { Interior, FlatBoundary, ArcBoundary, Exterior };

/// Cartesian grid of spacing h = 1/n over [-1,1]x[0,1], masked to the closed
/// half disk. Node (i, j) sits at (i*h - 1, j*h) and has id j*nx + i.
///
/// Classification:
///   j == 0 and |x1| < 1          -> FlatBoundary
///   |x| >= 1                     -> Exterior
///   all 8 neighbors non-exterior -> Interior
///   otherwise                    -> ArcBoundary (carries the Dirichlet datum)
class HalfDiskGrid {
 public:
  /// n >= 4 cells per unit length.
  explicit HalfDiskGrid(int n);
  /// Throws ValidationError unless 1/h is an integer >= 4 (to 1e-9).
  static std::shared_ptr<const HalfDiskGrid> from_spacing(double h);
  static std::shared_ptr<const HalfDiskGrid> make(int n) { return std::make_shared<const HalfDiskGrid>(n); }

  int n() const { return n_; }
  double h() const { return h_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return kinds_.size(); }

  std::size_t id(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
  int i_of(std::size_t id) const { return static_cast<int>(id % nx_); }
  int j_of(std::size_t id) const { return static_cast<int>(id / nx_); }
  Point point(std::size_t id) const { return point(i_of(id), j_of(id)); }
  Point point(int i, int j) const { return {i * h_ - 1.0, j * h_}; }

  NodeKind kind(std::size_t id) const { return kinds_[id]; }
  NodeKind kind(int i, int j) const { return kinds_[id(i, j)]; }
  bool is_interior(std::size_t id) const { return kinds_[id] == NodeKind::Interior; }
  bool is_exterior(std::size_t id) const { return kinds_[id] == NodeKind::Exterior; }
  bool in_range(int i, int j) const { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }

  std::size_t count(NodeKind k) const;
  const std::vector<NodeKind>& kinds() const { return kinds_; }

  /// True iff both grids have the same resolution.
  bool same_as(const HalfDiskGrid& o) const { return n_ == o.n_; }

 private:
  int n_;
  double h_;
  int nx_, ny_;
  std::vector<NodeKind> kinds_;
};

using GridPtr = std::shared_ptr<const HalfDiskGrid>;

}  // namespace fblab
