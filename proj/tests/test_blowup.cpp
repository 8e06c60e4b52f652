#include <cmath>
#include <numbers>

#include "catch_amalgamated.hpp"
#include "fblab/blowup.hpp"
#include "support.hpp"

using namespace fblab;
using Catch::Approx;

namespace {

QuadraticBlowup fit(double a, double b, double residual, double radius) {
  QuadraticBlowup q;
  q.a = a;
  q.b = b;
  q.residual = residual;
  q.radius = radius;
  q.nodes = 100;
  return q;
}

MProfile profile_with(double m) {
  MProfile p;
  p.shells = {{0.5, m}, {0.25, m}, {0.125, m}};
  p.smallest_shell = m;
  p.extrapolated = m;
  p.has_extrapolation = true;
  return p;
}

// Projection coefficient of x2^3 on x2^2 over the unit upper half disk,
// by tensor Gauss quadrature in polar coordinates (the x1 x2 coefficient
// vanishes by symmetry).
double projection_b_of_cubic() {
  std::vector<double> xr, wr, xt, wt;
  oracle::gauss_legendre(20, xr, wr);
  oracle::gauss_legendre(40, xt, wt);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xr.size(); ++i) {
    const double r = 0.5 * (xr[i] + 1.0);
    for (std::size_t k = 0; k < xt.size(); ++k) {
      const double t = 0.5 * std::numbers::pi * (xt[k] + 1.0);
      const double w = wr[i] * wt[k] * r;
      const double x2 = r * std::sin(t);
      num += w * std::pow(x2, 5);
      den += w * std::pow(x2, 4);
    }
  }
  return num / den;
}

}  // namespace

TEST_CASE("default radii halve down to 8h", "[blowup]") {
  HalfDiskGrid g(64);
  const auto r = default_radii(g);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == 0.5);
  CHECK(r[2] == 0.125);
  for (std::size_t k = 1; k < r.size(); ++k) CHECK(r[k] < r[k - 1]);
}

TEST_CASE("rescale examples", "[blowup]") {
  auto g = HalfDiskGrid::make(64);
  auto ref = reference_grid_for(*g, 0.125);

  const auto hom = ScalarField::sample(g, [](Point p) { return p.x1 * p.x2 + 0.5 * p.x2 * p.x2; });
  const auto v = rescale(hom, 0.5, ref);
  const double h_ref = ref->h();
  for (std::size_t id = 0; id < ref->size(); ++id) {
    if (!v.valid(id)) continue;
    const Point p = ref->point(id);
    CHECK(std::abs(v[id] - (p.x1 * p.x2 + 0.5 * p.x2 * p.x2)) <= h_ref * h_ref);
  }

  const auto cube = ScalarField::sample(g, [](Point p) { return p.x2 * p.x2 * p.x2; });
  const auto w = rescale(cube, 0.5, ref);
  for (std::size_t id = 0; id < ref->size(); ++id) {
    if (!w.valid(id)) continue;
    const Point p = ref->point(id);
    CHECK(w[id] == Approx(0.5 * p.x2 * p.x2 * p.x2).margin(1e-12));
  }

  const auto zero = rescale(ScalarField(g, 0.0), 0.25, ref);
  CHECK(zero.max_abs() == 0.0);
  REQUIRE_THROWS_AS(rescale(zero, 1.5, ref), ValidationError);
}

TEST_CASE("rescaling off-center marks points outside the source invalid", "[blowup]") {
  auto g = HalfDiskGrid::make(32);
  auto ref = reference_grid_for(*g, 0.25);
  const auto v = rescale(ScalarField(g, 1.0), 0.5, ref, {0.75, 0.0});
  bool some_invalid = false;
  for (std::size_t id = 0; id < ref->size(); ++id) {
    if (ref->is_exterior(id)) continue;
    const Point src = Point{0.75, 0.0} + 0.5 * ref->point(id);
    if (norm(src) > 1.0 + 1e-12) {
      CHECK_FALSE(v.valid(id));
      some_invalid = true;
    }
  }
  CHECK(some_invalid);
}

TEST_CASE("fit_halfplane_quadratic examples", "[blowup]") {
  auto g = HalfDiskGrid::make(64);
  const auto exact = fit_halfplane_quadratic(ScalarField::sample(g, [](Point p) { return p.x1 * p.x2 + 0.5 * p.x2 * p.x2; }));
  CHECK(exact.a == Approx(1.0).margin(1e-12));
  CHECK(exact.b == Approx(0.5).margin(1e-12));
  CHECK(exact.residual <= 1e-12);

  const auto cube = fit_halfplane_quadratic(ScalarField::sample(g, [](Point p) { return p.x2 * p.x2 * p.x2; }));
  CHECK(cube.a == Approx(0.0).margin(1e-12));
  CHECK(cube.b == Approx(projection_b_of_cubic()).margin(0.02));
  CHECK(cube.residual > 0.05);

  const auto zero = fit_halfplane_quadratic(ScalarField(g, 0.0));
  CHECK(zero.a == 0.0);
  CHECK(zero.b == 0.0);
  CHECK(zero.residual == 0.0);

  auto tiny = HalfDiskGrid::make(4);
  ScalarField few(tiny, 0.0);
  for (std::size_t id = 0; id < tiny->size(); ++id) few.mark_invalid(id);
  REQUIRE_THROWS_AS(fit_halfplane_quadratic(few), ValidationError);
}

TEST_CASE("rescale then fit is a fixed point on exact quadratics", "[blowup][property]") {
  auto g = HalfDiskGrid::make(64);
  const auto u = ScalarField::sample(g, [](Point p) { return -0.7 * p.x1 * p.x2 + 1.3 * p.x2 * p.x2; });
  for (double r : default_radii(*g)) {
    const auto q = fit_halfplane_quadratic(rescale(u, r, reference_grid_for(*g, 0.125)));
    CHECK(q.a == Approx(-0.7).margin(1e-8));
    CHECK(q.b == Approx(1.3).margin(1e-8));
  }
}

TEST_CASE("m_profile examples", "[blowup]") {
  auto g = HalfDiskGrid::make(128);
  const std::vector<double> shells{0.5, 0.25, 0.125, 0.0625};
  const double h = g->h();

  const auto flat = m_profile(ScalarField::sample(g, [](Point p) { return 0.5 * p.x2 * p.x2; }), shells);
  for (const auto& [r, m] : flat.shells) CHECK(m <= h);
  CHECK(flat.estimate() <= 0.05);

  const auto tilted = m_profile(ScalarField::sample(g, [](Point p) { return p.x1 * p.x2 + 0.5 * p.x2 * p.x2; }), shells);
  for (const auto& [r, m] : tilted.shells) CHECK(m == Approx(1.0).margin(1e-9));
  CHECK(tilted.estimate() == Approx(1.0).margin(1e-6));

  const auto bent =
      m_profile(ScalarField::sample(g, [](Point p) { return 0.5 * p.x2 * p.x2 + p.x1 * p.x1 * p.x2; }), shells);
  for (const auto& [r, m] : bent.shells) {
    CHECK(m / r >= 2.0 * 0.8);
    CHECK(m / r <= 2.0 * 1.2);
  }
  CHECK(bent.estimate() <= 0.05);
}

TEST_CASE("classify_blowup examples", "[blowup]") {
  const std::vector<QuadraticBlowup> flat{fit(0.0, 0.5, 0.001, 0.5), fit(0.0, 0.5, 0.001, 0.25),
                                          fit(0.0, 0.5, 0.001, 0.125)};
  CHECK(classify_blowup(profile_with(0.0), flat).alternative == Alternative::CaseI);

  const std::vector<QuadraticBlowup> tilted{fit(1.0, 0.5, 0.001, 0.5), fit(1.0, 0.5, 0.001, 0.25),
                                            fit(1.0, 0.5, 0.001, 0.125)};
  const auto c2 = classify_blowup(profile_with(1.0), tilted);
  CHECK(c2.alternative == Alternative::CaseII);
  CHECK(c2.a == Approx(1.0));

  const std::vector<QuadraticBlowup> poor{fit(0.0, 0.5, 0.3, 0.5), fit(0.0, 0.5, 0.3, 0.25), fit(0.0, 0.5, 0.3, 0.125)};
  const auto c3 = classify_blowup(profile_with(0.0), poor);
  CHECK(c3.alternative == Alternative::Indeterminate);
  CHECK_FALSE(c3.diagnostics.empty());

  // Small M with a large fitted a matches neither case.
  CHECK(classify_blowup(profile_with(0.0), tilted).alternative == Alternative::Indeterminate);
}

TEST_CASE("uniqueness_diagnostic examples", "[blowup]") {
  const auto lt = EllipticOperator::linear_trace();
  const std::vector<QuadraticBlowup> same{fit(1.0, 0.5, 0.0, 0.5), fit(1.0, 0.5, 0.0, 0.25), fit(1.0, 0.5, 0.0, 0.125)};
  const auto u1 = uniqueness_diagnostic(same, lt);
  CHECK(u1.consistent);
  CHECK(u1.spread == 0.0);

  const std::vector<QuadraticBlowup> drift{fit(1.0, 0.5, 0.0, 0.5), fit(0.9, 0.5, 0.0, 0.25), fit(0.5, 0.5, 0.0, 0.125)};
  const auto u2 = uniqueness_diagnostic(drift, lt);
  CHECK_FALSE(u2.consistent);
  CHECK(u2.spread == Approx(0.5));

  const std::vector<QuadraticBlowup> half{fit(0.0, 0.5, 0.0, 0.5), fit(0.0, 0.5, 0.0, 0.25), fit(0.0, 0.5, 0.0, 0.125)};
  const auto u3 = uniqueness_diagnostic(half, lt);
  CHECK(u3.limit_value == Approx(1.0));
  CHECK(u3.limit_ok);
}

TEST_CASE("analyze_blowup end to end and the gradient gate", "[blowup]") {
  auto g = HalfDiskGrid::make(64);
  const auto lt = EllipticOperator::linear_trace();

  const auto rep = analyze_blowup(ScalarField::sample(g, [](Point p) { return 0.5 * p.x2 * p.x2; }), lt);
  CHECK(rep.status == "ok");
  CHECK(rep.classification.alternative == Alternative::CaseI);
  CHECK(rep.uniqueness.consistent);

  const auto tilted = analyze_blowup(ScalarField::sample(g, [](Point p) { return p.x1 * p.x2 + 0.5 * p.x2 * p.x2; }), lt);
  CHECK(tilted.classification.alternative == Alternative::CaseII);
  // M matches |a| whenever the classification is Case(ii).
  CHECK(std::abs(tilted.profile.estimate() - std::abs(tilted.classification.a)) <= 0.05);

  const auto refused = analyze_blowup(ScalarField::sample(g, [](Point p) { return p.x2; }), lt);
  CHECK(refused.status == "refused");
  CHECK_FALSE(refused.gate_passed);

  BlowupConfig off;
  off.center = {0.01, 0.0};
  REQUIRE_THROWS_AS(analyze_blowup(ScalarField(g, 0.0), lt, off), ValidationError);
  off.center = {0.0, 0.5};
  REQUIRE_THROWS_AS(analyze_blowup(ScalarField(g, 0.0), lt, off), ValidationError);
}
