#include "fblab/structure_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fblab {

double Sampler::uniform(double lo, double hi) {
  const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

SymMatrix Sampler::symmetric(int dim, double scale) {
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) m.set(i, j, uniform(-scale, scale));
  return m;
}

Point Sampler::half_ball_point() {
  for (;;) {
    const Point p{uniform(-1.0, 1.0), uniform(0.0, 1.0)};
    if (p.x2 > 0.0 && norm(p) < 1.0) return p;
  }
}

std::string to_string(ConvexityShape shape) {
  switch (shape) {
    case ConvexityShape::Affine: return "affine";
    case ConvexityShape::Concave: return "concave";
    case ConvexityShape::Convex: return "convex";
    case ConvexityShape::Neither: return "neither";
  }
  return "neither";
}

namespace {

void record(HypothesisResult& h, double margin, const Witness& w) {
  if (!h.witness || margin < h.worst_margin) {
    h.worst_margin = margin;
    h.witness = w;
  }
}

// Unit directions that expose most sign errors without luck:
// +-e_i e_i^T, +-I and the symmetric off-diagonal unit.
std::vector<SymMatrix> probe_directions(int dim) {
  std::vector<SymMatrix> out;
  for (int i = 0; i < dim; ++i) {
    SymMatrix e(dim);
    e.set(i, i, 1.0);
    out.push_back(e);
    out.push_back(-1.0 * e);
  }
  out.push_back(SymMatrix::identity(dim));
  out.push_back(SymMatrix::identity(dim, -1.0));
  if (dim >= 2) {
    SymMatrix off(dim);
    off.set(0, 1, 1.0);
    out.push_back(off);
  }
  return out;
}

}  // namespace

StructureReport check_structure(const EllipticOperator& op, int samples, std::uint64_t seed, double tolerance) {
  if (samples < 1) throw ValidationError("check_structure needs samples >= 1");
  StructureReport rep;
  rep.seed = seed;
  rep.samples = samples;
  rep.tolerance = tolerance;
  rep.h1.name = "H1";
  rep.h2.name = "H2";
  rep.h3.name = "H3";
  rep.h4.name = "H4";
  rep.h1.checked = rep.h2.checked = rep.h3.checked = true;

  const int dim = op.dim();
  const auto& bounds = op.bounds();
  Sampler sampler(seed);

  double concave_slack = std::numeric_limits<double>::infinity();
  double convex_slack = std::numeric_limits<double>::infinity();
  std::optional<Witness> concave_witness, convex_witness;

  auto check_pair = [&](const SymMatrix& m, const SymMatrix& n, Point x) {
    const Witness w{m, n, x, x};
    const SymMatrix zero(dim);
    record(rep.h1, -std::abs(op.evaluate(zero, x)), w);

    const double diff = op.evaluate(m, x) - op.evaluate(n, x);
    const SymMatrix delta = m - n;
    const double lower = diff - pucci_minus(delta, bounds);
    const double upper = pucci_plus(delta, bounds) - diff;
    record(rep.h2, std::min(lower, upper), w);

    const SymMatrix mid = 0.5 * (m + n);
    const double gap = op.evaluate(mid, x) - 0.5 * (op.evaluate(m, x) + op.evaluate(n, x));
    if (gap < concave_slack) {
      concave_slack = gap;
      concave_witness = w;
    }
    if (-gap < convex_slack) {
      convex_slack = -gap;
      convex_witness = w;
    }
  };

  const SymMatrix zero(dim);
  for (const auto& d : probe_directions(dim)) check_pair(d, zero, Point{0.0, 0.5});
  for (int s = 0; s < samples; ++s) {
    const double scale_m = std::pow(10.0, sampler.uniform(-1.0, 1.0));
    const double scale_n = std::pow(10.0, sampler.uniform(-1.0, 1.0));
    const SymMatrix m = sampler.symmetric(dim, scale_m);
    const SymMatrix n = sampler.symmetric(dim, scale_n);
    check_pair(m, n, sampler.half_ball_point());
  }

  rep.h1.passed = rep.h1.worst_margin >= -tolerance;
  rep.h2.passed = rep.h2.worst_margin >= -tolerance;
  const bool concave = concave_slack >= -tolerance;
  const bool convex = convex_slack >= -tolerance;
  rep.shape = concave && convex ? ConvexityShape::Affine
              : concave         ? ConvexityShape::Concave
              : convex          ? ConvexityShape::Convex
                                : ConvexityShape::Neither;
  rep.h3.passed = concave || convex;
  rep.h3.worst_margin = std::max(concave_slack, convex_slack);
  rep.h3.witness = concave_slack >= convex_slack ? concave_witness : convex_witness;
  if (rep.h3.passed) rep.h3.witness.reset();
  if (rep.h1.passed) rep.h1.witness.reset();
  if (rep.h2.passed) rep.h2.witness.reset();

  if (const auto& dep = op.x_dependence()) {
    rep.h4.checked = true;
    for (int s = 0; s < samples; ++s) {
      const SymMatrix m = sampler.symmetric(dim, std::pow(10.0, sampler.uniform(-1.0, 2.0)));
      const Point x = sampler.half_ball_point();
      const Point y = sampler.half_ball_point();
      const double lhs = std::abs(op.evaluate(m, x) - op.evaluate(m, y));
      const double rhs = op.holder_constant() * (m.nuclear_norm() + 1.0) * std::pow(norm(x - y), dep->alphabar);
      record(rep.h4, rhs - lhs, Witness{m, m, x, y});
    }
    rep.h4.passed = rep.h4.worst_margin >= -tolerance;
    if (rep.h4.passed) rep.h4.witness.reset();
  }
  return rep;
}

double x_modulus_beta(const EllipticOperator& op, Point x, Point x0, int samples, std::uint64_t seed) {
  if (!op.x_dependence()) return 0.0;
  if (samples < 1) throw ValidationError("x_modulus_beta needs samples >= 1");
  Sampler sampler(seed);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double scale = std::pow(10.0, sampler.uniform(-2.0, 6.0));
    const SymMatrix m = sampler.symmetric(op.dim(), scale);
    const double ratio = std::abs(op.evaluate(m, x) - op.evaluate(m, x0)) / (m.nuclear_norm() + 1.0);
    best = std::max(best, ratio);
  }
  return best;
}

}  // namespace fblab
