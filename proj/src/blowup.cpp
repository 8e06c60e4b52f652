#include "fblab/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace fblab {

std::vector<double> default_radii(const HalfDiskGrid& grid, int k_max) {
  std::vector<double> out;
  for (int k = 1; k <= k_max; ++k) {
    const double r = std::ldexp(1.0, -k);
    if (r < 8.0 * grid.h() * (1.0 - 1e-12)) break;
    out.push_back(r);
  }
  return out;
}

GridPtr reference_grid_for(const HalfDiskGrid& source, double r_min) {
  if (!(r_min > 0.0 && r_min <= 1.0)) throw ValidationError("reference radius must lie in (0, 1]");
  const int n = std::max(4, static_cast<int>(std::floor(source.n() * r_min + 1e-9)));
  return HalfDiskGrid::make(n);
}

ScalarField rescale(const ScalarField& u, double r, GridPtr reference, Point center) {
  if (!(r > 0.0 && r < 1.0)) throw ValidationError("rescale radius must lie in (0, 1)");
  if (!reference) throw ValidationError("rescale needs a reference grid");
  ScalarField v(reference);
  const auto& g = *reference;
  const double inv_r2 = 1.0 / (r * r);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.is_exterior(k)) continue;
    const Point p = center + r * g.point(k);
    if (p.x2 < 0.0 || p.x1 * p.x1 + p.x2 * p.x2 > 1.0) {
      v.mark_invalid(k);
      continue;
    }
    v[k] = u.interpolate(p) * inv_r2;
  }
  return v;
}

QuadraticBlowup fit_halfplane_quadratic(const ScalarField& v) {
  const auto& g = v.grid();
  // Normal equations for the basis {x1 x2, x2^2}.
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, t1 = 0.0, t2 = 0.0;
  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.is_interior(k) || !v.valid(k)) continue;
    const Point p = g.point(k);
    const double p1 = p.x1 * p.x2, p2 = p.x2 * p.x2;
    s11 += p1 * p1;
    s12 += p1 * p2;
    s22 += p2 * p2;
    t1 += p1 * v[k];
    t2 += p2 * v[k];
    nodes.push_back(k);
  }
  if (nodes.size() < 10) {
    throw ValidationError("blow-up fit needs at least 10 valid nodes (got " + std::to_string(nodes.size()) + ")");
  }
  const double det = s11 * s22 - s12 * s12;
  QuadraticBlowup q;
  q.a = (t1 * s22 - t2 * s12) / det;
  q.b = (s11 * t2 - s12 * t1) / det;
  q.nodes = nodes.size();
  double misfit = 0.0, vmax = 0.0;
  for (std::size_t k : nodes) {
    const Point p = g.point(k);
    misfit = std::max(misfit, std::abs(v[k] - (q.a * p.x1 * p.x2 + q.b * p.x2 * p.x2)));
    vmax = std::max(vmax, std::abs(v[k]));
  }
  q.residual = misfit / std::max(1.0, vmax);
  return q;
}

MProfile m_profile(const ScalarField& u, const std::vector<double>& shells, Point center) {
  const auto& g = u.grid();
  const auto grad = u.gradient();
  MProfile prof;
  std::vector<double> sorted = shells;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (double r : sorted) {
    if (r < 8.0 * g.h() * (1.0 - 1e-12)) continue;
    bool any = false;
    double best = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g.is_exterior(k)) continue;
      const Point p = g.point(k);
      if (p.x2 < g.h() * (1.0 - 1e-12)) continue;
      const double d = norm(p - center);
      if (d < 0.5 * r || d > r) continue;
      any = true;
      best = std::max(best, std::abs(grad.g1[k]) / p.x2);
    }
    if (any) prof.shells.emplace_back(r, best);
  }
  if (prof.shells.empty()) return prof;
  prof.smallest_shell = prof.shells.back().second;
  if (prof.shells.size() >= 3) {
    double sr = 0.0, sv = 0.0, srr = 0.0, srv = 0.0;
    for (std::size_t i = prof.shells.size() - 3; i < prof.shells.size(); ++i) {
      const auto [r, val] = prof.shells[i];
      sr += r;
      sv += val;
      srr += r * r;
      srv += r * val;
    }
    const double slope = (3.0 * srv - sr * sv) / (3.0 * srr - sr * sr);
    prof.extrapolated_raw = (sv - slope * sr) / 3.0;
    prof.extrapolated = std::max(0.0, prof.extrapolated_raw);
    prof.has_extrapolation = true;
  }
  return prof;
}

std::string to_string(Alternative a) {
  switch (a) {
    case Alternative::CaseI: return "case-i";
    case Alternative::CaseII: return "case-ii";
    case Alternative::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

namespace {

std::vector<QuadraticBlowup> accepted_fits(const std::vector<QuadraticBlowup>& fits, double fit_accept) {
  std::vector<QuadraticBlowup> out;
  for (const auto& f : fits)
    if (f.residual <= fit_accept) out.push_back(f);
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

Classification classify_blowup(const MProfile& profile, const std::vector<QuadraticBlowup>& fits,
                               const BlowupThresholds& t) {
  Classification c;
  const auto acc = accepted_fits(fits, t.fit_accept);
  c.accepted = acc.size();
  if (acc.size() < 3) {
    c.diagnostics.push_back("only " + std::to_string(acc.size()) + " fits below fit_accept=" + fmt(t.fit_accept));
    return c;
  }
  c.a = acc.back().a;
  c.b = acc.back().b;
  const double m = profile.estimate();

  bool small_a = true, positive_b = true;
  for (const auto& f : acc) {
    small_a = small_a && std::abs(f.a) <= t.a_zero_tol;
    positive_b = positive_b && f.b > 0.0;
  }
  double a_lo = std::numeric_limits<double>::infinity(), a_hi = -a_lo;
  for (std::size_t i = acc.size() - 3; i < acc.size(); ++i) {
    a_lo = std::min(a_lo, acc[i].a);
    a_hi = std::max(a_hi, acc[i].a);
  }
  const bool a_stable = a_hi - a_lo <= t.uniq_tol;

  if (m <= t.m_zero_tol && small_a && positive_b) {
    c.alternative = Alternative::CaseI;
  } else if (m > t.m_zero_tol && a_stable && std::abs(c.a) > t.a_zero_tol) {
    c.alternative = Alternative::CaseII;
  } else {
    c.diagnostics.push_back("M estimate " + fmt(m) + " vs m_zero_tol " + fmt(t.m_zero_tol));
    if (!small_a) c.diagnostics.push_back("some fitted |a| exceeds a_zero_tol " + fmt(t.a_zero_tol));
    if (!positive_b) c.diagnostics.push_back("some fitted b is not positive");
    if (!a_stable) c.diagnostics.push_back("fitted a spreads by " + fmt(a_hi - a_lo) + " over the last 3 radii");
  }
  return c;
}

UniquenessReport uniqueness_diagnostic(const std::vector<QuadraticBlowup>& fits, const EllipticOperator& op,
                                       const BlowupThresholds& t, double target) {
  UniquenessReport rep;
  rep.limit_target = target;
  const auto acc = accepted_fits(fits, t.fit_accept);
  rep.accepted = acc.size();
  for (std::size_t i = 0; i < acc.size(); ++i)
    for (std::size_t j = i + 1; j < acc.size(); ++j)
      rep.spread = std::max(rep.spread, std::hypot(acc[i].a - acc[j].a, acc[i].b - acc[j].b));
  if (acc.size() < 3) {
    rep.diagnostics.push_back("fewer than 3 accepted fits");
    return rep;
  }
  rep.consistent = rep.spread <= t.uniq_tol;
  const auto& last = acc.back();
  rep.limit_value = op.evaluate(SymMatrix::two_by_two(0.0, last.a, 2.0 * last.b));
  rep.limit_ok = std::abs(rep.limit_value - target) <= t.limit_tol;
  if (!rep.consistent) rep.diagnostics.push_back("fits spread by " + fmt(rep.spread));
  if (!rep.limit_ok) rep.diagnostics.push_back("F(D^2 u0) = " + fmt(rep.limit_value));
  return rep;
}

BlowupReport analyze_blowup(const ScalarField& u, const EllipticOperator& op, const BlowupConfig& cfg) {
  const auto& g = u.grid();
  BlowupReport rep;
  rep.center = cfg.center;
  rep.thresholds = cfg.thresholds;
  if (std::abs(cfg.center.x2) > 1e-12) throw ValidationError("blow-up center must lie on the flat boundary");
  const double s = (cfg.center.x1 + 1.0) / g.h();
  const int ci = static_cast<int>(std::lround(s));
  if (std::abs(s - ci) > 1e-9 || ci <= 0 || ci >= g.nx() - 1) {
    throw ValidationError("blow-up center must be a flat-boundary grid node");
  }
  rep.gradient_norm = u.gradient().magnitude(g.id(ci, 0));
  rep.gate_passed = rep.gradient_norm <= g.h();
  if (!rep.gate_passed) {
    rep.status = "refused";
    rep.classification.diagnostics.push_back("|grad u(center)| = " + fmt(rep.gradient_norm) + " exceeds h");
    return rep;
  }
  rep.status = "ok";

  std::vector<double> radii = cfg.radii.empty() ? default_radii(g) : cfg.radii;
  std::sort(radii.begin(), radii.end(), std::greater<>());
  radii.erase(std::remove_if(radii.begin(), radii.end(), [&](double r) { return r < 8.0 * g.h() * (1.0 - 1e-12); }),
              radii.end());
  if (radii.empty()) throw ValidationError("no blow-up radius is resolvable (need r >= 8h)");
  const GridPtr ref = reference_grid_for(g, radii.back());
  rep.reference_spacing = ref->h();
  for (double r : radii) {
    QuadraticBlowup q = fit_halfplane_quadratic(rescale(u, r, ref, cfg.center));
    q.radius = r;
    rep.fits.push_back(q);
  }
  rep.profile = m_profile(u, radii, cfg.center);
  rep.classification = classify_blowup(rep.profile, rep.fits, cfg.thresholds);
  rep.uniqueness = uniqueness_diagnostic(rep.fits, op, cfg.thresholds);
  return rep;
}

}  // namespace fblab
