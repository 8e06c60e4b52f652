#include "fblab/boundary_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>

namespace fblab {

std::vector<Point> BoundaryCurve::vertices() const {
  std::vector<Point> out;
  for (const auto& line : polylines) out.insert(out.end(), line.begin(), line.end());
  return out;
}

std::size_t BoundaryCurve::vertex_count() const {
  std::size_t n = 0;
  for (const auto& line : polylines) n += line.size();
  return n;
}

namespace {

// Edge keys: horizontal edge from node (i,j) to (i+1,j) -> 2*id,
// vertical edge from (i,j) to (i,j+1) -> 2*id + 1.
using EdgeKey = std::size_t;

struct Segment {
  EdgeKey a, b;
};

Point edge_midpoint(const HalfDiskGrid& g, EdgeKey e) {
  const std::size_t id = e / 2;
  const Point p = g.point(id);
  return (e % 2 == 0) ? Point{p.x1 + 0.5 * g.h(), p.x2} : Point{p.x1, p.x2 + 0.5 * g.h()};
}

std::vector<std::vector<Point>> chain(const HalfDiskGrid& g, const std::vector<Segment>& segs) {
  std::map<EdgeKey, std::vector<std::size_t>> touching;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    touching[segs[s].a].push_back(s);
    touching[segs[s].b].push_back(s);
  }
  std::vector<bool> used(segs.size(), false);
  std::vector<std::vector<Point>> lines;

  auto walk = [&](std::size_t first, EdgeKey start) {
    std::vector<EdgeKey> keys{start};
    EdgeKey cur = start;
    std::size_t s = first;
    while (true) {
      used[s] = true;
      cur = segs[s].a == cur ? segs[s].b : segs[s].a;
      keys.push_back(cur);
      std::size_t next = segs.size();
      for (std::size_t t : touching[cur])
        if (!used[t]) {
          next = t;
          break;
        }
      if (next == segs.size()) break;
      s = next;
    }
    std::vector<Point> line;
    for (EdgeKey k : keys) line.push_back(edge_midpoint(g, k));
    lines.push_back(std::move(line));
  };

  // Open chains first, starting from endpoints of degree one.
  for (const auto& [key, list] : touching) {
    if (list.size() != 1 || used[list.front()]) continue;
    walk(list.front(), key);
  }
  for (std::size_t s = 0; s < segs.size(); ++s)
    if (!used[s]) walk(s, segs[s].a);
  return lines;
}

}  // namespace

BoundaryCurve contour_states(const HalfDiskGrid& g, const std::vector<CornerState>& states, CurveLabel label) {
  if (states.size() != g.size()) throw ValidationError("state mask does not match the grid");
  std::vector<Segment> segs;
  const double cutoff = 0.5 * g.h() * (1.0 + 1e-9);
  for (int j = 0; j + 1 < g.ny(); ++j) {
    for (int i = 0; i + 1 < g.nx(); ++i) {
      const std::size_t c0 = g.id(i, j), c1 = g.id(i + 1, j), c2 = g.id(i + 1, j + 1), c3 = g.id(i, j + 1);
      const CornerState s[4] = {states[c0], states[c1], states[c2], states[c3]};
      if (std::any_of(s, s + 4, [](CornerState c) { return c == CornerState::Ignore; })) continue;
      const int idx = (s[0] == CornerState::In ? 1 : 0) | (s[1] == CornerState::In ? 2 : 0) |
                      (s[2] == CornerState::In ? 4 : 0) | (s[3] == CornerState::In ? 8 : 0);
      if (idx == 0 || idx == 15) continue;
      const EdgeKey bottom = 2 * c0, right = 2 * c1 + 1, top = 2 * c3, left = 2 * c0 + 1;
      auto add = [&](EdgeKey a, EdgeKey b) {
        if (edge_midpoint(g, a).x2 <= cutoff || edge_midpoint(g, b).x2 <= cutoff) return;
        segs.push_back({a, b});
      };
      switch (idx) {
        case 1: case 14: add(left, bottom); break;
        case 2: case 13: add(bottom, right); break;
        case 3: case 12: add(left, right); break;
        case 4: case 11: add(right, top); break;
        case 6: case 9: add(bottom, top); break;
        case 7: case 8: add(left, top); break;
        // Saddles: the center counts as In, so the In corners connect.
        case 5: add(bottom, right); add(top, left); break;
        case 10: add(left, bottom); add(right, top); break;
        default: break;
      }
    }
  }
  BoundaryCurve curve;
  curve.label = label;
  curve.polylines = chain(g, segs);
  return curve;
}

BoundaryCurve extract_gamma(const ActiveSet& active) {
  const auto& g = *active.grid;
  std::vector<CornerState> states(g.size(), CornerState::Ignore);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g.is_interior(k)) states[k] = active.contains(k) ? CornerState::In : CornerState::Out;
  return contour_states(g, states, CurveLabel::Gamma);
}

BoundaryCurve extract_gamma_i(const ScalarField& u, double tol) {
  const auto& g = u.grid();
  auto zero = [&](int i, int j) {
    if (!g.in_range(i, j)) return false;
    const std::size_t k = g.id(i, j);
    return !g.is_exterior(k) && std::abs(u[k]) <= tol;
  };
  std::vector<CornerState> states(g.size(), CornerState::Ignore);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const std::size_t k = g.id(i, j);
      if (g.is_exterior(k)) continue;
      if (!g.is_interior(k)) {
        states[k] = CornerState::Out;
        continue;
      }
      bool all = true;
      for (int dj = -1; dj <= 1 && all; ++dj)
        for (int di = -1; di <= 1; ++di)
          if (!zero(i + di, j + dj)) {
            all = false;
            break;
          }
      states[k] = all ? CornerState::In : CornerState::Out;
    }
  }
  return contour_states(g, states, CurveLabel::GammaI);
}

ModulusTable modulus_table(const BoundaryCurve& curve, const std::vector<double>& radii, Point center) {
  const auto verts = curve.vertices();
  ModulusTable table;
  for (double r : radii) {
    ModulusEntry e{r, 0.0, true};
    for (const Point& p : verts) {
      const double d = norm(p - center);
      if (d > r || d == 0.0) continue;
      e.empty = false;
      e.omega = std::max(e.omega, std::min(1.0, p.x2 / d));
    }
    if (!e.empty) table.r0 = std::max(table.r0, r);
    table.entries.push_back(e);
  }
  return table;
}

ConeClearance cone_clearance(const BoundaryCurve& curve, double epsilon, double rho, Point center) {
  if (!(epsilon > 0.0)) throw ValidationError("cone_clearance needs epsilon > 0");
  ConeClearance out;
  for (const Point& p : curve.vertices()) {
    if (norm(p - center) >= rho) continue;
    if (p.x2 > epsilon * std::abs(p.x1 - center.x1)) out.witnesses.push_back(p);
  }
  out.clear = out.witnesses.empty();
  return out;
}

double gamma_i_clearance(const BoundaryCurve& curve, Point center) {
  double d = std::numeric_limits<double>::infinity();
  for (const Point& p : curve.vertices()) d = std::min(d, norm(p - center));
  return d;
}

ComplementMeasure complement_measure(const ActiveSet& active, double s, Point center) {
  if (!(s > 0.0 && s <= 1.0)) throw ValidationError("complement_measure needs s in (0, 1]");
  const auto& g = *active.grid;
  ComplementMeasure out;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const std::size_t k = g.id(i, j);
      if (!g.is_interior(k) || active.contains(k) || norm(g.point(k) - center) >= s) continue;
      ++out.nodes;
      bool block_outside = true;
      for (int dj = -1; dj <= 1 && block_outside; ++dj)
        for (int di = -1; di <= 1; ++di)
          if (active.contains(g.id(i + di, j + dj))) {
            block_outside = false;
            break;
          }
      if (block_outside) out.empty_interior = false;
    }
  }
  out.measure = g.h() * g.h() * static_cast<double>(out.nodes);
  return out;
}

void write_curve_csv(const std::string& path, const BoundaryCurve& curve) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "polyline,vertex,x1,x2\n" << std::setprecision(17);
  for (std::size_t l = 0; l < curve.polylines.size(); ++l)
    for (std::size_t v = 0; v < curve.polylines[l].size(); ++v)
      out << l << ',' << v << ',' << curve.polylines[l][v].x1 << ',' << curve.polylines[l][v].x2 << '\n';
}

void write_modulus_csv(const std::string& path, const ModulusTable& table) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "r,omega,empty\n" << std::setprecision(17);
  for (const auto& e : table.entries) out << e.r << ',' << e.omega << ',' << (e.empty ? 1 : 0) << '\n';
}

}  // namespace fblab
