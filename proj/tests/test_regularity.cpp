#include <cmath>
#include <filesystem>
#include <fstream>

#include "catch_amalgamated.hpp"
#include "fblab/fb_solver.hpp"
#include "fblab/regularity.hpp"
#include "support.hpp"

using namespace fblab;
using Catch::Approx;

namespace {

double cubic_perturbed(Point p) { return 0.5 * p.x2 * p.x2 + 0.1 * p.x2 * p.x2 * p.x2; }

double detached(Point p) {
  const double t = std::max(p.x2 - 0.25, 0.0);
  return 0.5 * t * t;
}

}  // namespace

TEST_CASE("fit_local_quadratic examples", "[fit]") {
  auto g = HalfDiskGrid::make(64);

  const auto xy = fit_local_quadratic(ScalarField::sample(g, [](Point p) { return p.x1 * p.x2; }), {0.1, 0.3}, 0.2);
  CHECK(xy.misfit <= 1e-12);
  const auto m = oracle::of(xy.poly.hessian);
  CHECK(m.a == Approx(0.0).margin(1e-10));
  CHECK(m.b == Approx(1.0).margin(1e-10));
  CHECK(m.c == Approx(0.0).margin(1e-10));
  CHECK(xy.poly({0.1, 0.3}) == Approx(0.03).margin(1e-12));

  const auto cube = fit_local_quadratic(ScalarField::sample(g, [](Point p) { return p.x2 * p.x2 * p.x2; }),
                                        {0.0, 0.5}, 0.1);
  const auto c = oracle::of(cube.poly.hessian);
  CHECK(c.a == Approx(0.0).margin(1e-8));
  CHECK(c.b == Approx(0.0).margin(1e-8));
  CHECK(c.c == Approx(3.0).margin(1e-8));

  // A = I for the trace, so the correction is H - t I with 2 - 2t = 1.
  const auto lt = EllipticOperator::linear_trace();
  const auto sq = fit_local_quadratic(ScalarField::sample(g, [](Point p) { return p.x2 * p.x2; }), {0.0, 0.0}, 0.5,
                                      FitConstraint{&lt, 1.0});
  const auto s = oracle::of(sq.poly.hessian);
  CHECK(s.a == Approx(-0.5).margin(1e-8));
  CHECK(s.b == Approx(0.0).margin(1e-8));
  CHECK(s.c == Approx(1.5).margin(1e-8));

  REQUIRE_THROWS_AS(fit_local_quadratic(ScalarField(g, 0.0), {0.0, 0.0}, 2.0 * g->h()), ValidationError);
}

TEST_CASE("constrained fits hit the target at every level", "[fit][property]") {
  auto g = HalfDiskGrid::make(128);
  const auto ops = {EllipticOperator::linear_trace(), EllipticOperator::pucci_minus({1.0, 2.0}),
                    EllipticOperator::pucci_plus({1.0, 3.0})};
  const auto u = ScalarField::sample(g, [](Point p) { return std::sin(2.0 * p.x1) * p.x2 + 0.3 * p.x2 * p.x2; });
  for (const auto& op : ops) {
    for (double target : {1.0, 0.5}) {
      const auto prof = dyadic_profile(u, {0.0, 0.0}, 0.5, op, target);
      REQUIRE(prof.levels.size() >= 4);
      for (const auto& lvl : prof.levels) CHECK(op.evaluate(lvl.poly.hessian) == Approx(target).margin(1e-8));
    }
  }
}

TEST_CASE("dyadic_profile examples", "[dyadic]") {
  auto g = HalfDiskGrid::make(128);
  const auto lt = EllipticOperator::linear_trace();

  const auto exact = dyadic_profile(ScalarField::sample(g, [](Point p) { return 0.5 * p.x2 * p.x2; }), {}, 0.5, lt);
  REQUIRE(exact.levels.size() == 5);  // rho^k from 1 down to 8h = 1/16
  for (const auto& lvl : exact.levels) {
    CHECK(lvl.misfit <= 1e-10);
    CHECK(lvl.increment <= 1e-10);
    CHECK(lvl.radius >= 8.0 * g->h());
  }

  // The cubic remainder is O(rho^{3k}), so the scaled misfit decays like rho^k.
  const auto cubic = dyadic_profile(ScalarField::sample(g, cubic_perturbed), {}, 0.5, lt);
  for (std::size_t k = 1; k < cubic.levels.size(); ++k) {
    const double ratio = cubic.levels[k].scaled_misfit / cubic.levels[k - 1].scaled_misfit;
    CHECK(ratio == Approx(0.5).margin(0.15));
    CHECK(cubic.levels[k].increment <= 1.0);
  }
  CHECK(cubic.uniform_constant);

  // |D^2 u| <= 1 piecewise, so fitted Hessians move by at most 2 per level.
  const auto pieces = dyadic_profile(ScalarField::sample(g, detached), {}, 0.5, lt);
  for (const auto& lvl : pieces.levels) CHECK(lvl.increment <= 2.0);
}

TEST_CASE("bmo_profile examples", "[bmo]") {
  auto g = HalfDiskGrid::make(128);
  const auto lt = EllipticOperator::linear_trace();

  const auto exact = bmo_profile(ScalarField::sample(g, [](Point p) { return 0.5 * p.x2 * p.x2; }), {}, 0.5, lt);
  for (const auto& lvl : exact.levels) CHECK(lvl.value <= 1e-10);

  // D^2 u - D^2 P_k is 0.6 x2 - c_k in the (2,2) entry; its mean square over a
  // half ball of radius s is at most (0.6 s)^2.
  const auto cubic = bmo_profile(ScalarField::sample(g, cubic_perturbed), {}, 0.5, lt);
  REQUIRE(cubic.levels.size() >= 5);
  for (std::size_t k = 1; k <= 4; ++k) {
    CHECK(cubic.levels[k].value <= 0.36 * cubic.levels[k].radius * cubic.levels[k].radius + 1e-10);
    CHECK(cubic.levels[k].value <= cubic.levels[k - 1].value);
  }

  SolverConfig cfg;
  cfg.mode = SolveMode::Obstacle;
  const auto r = solve_obstacle(lt, detached, HalfDiskGrid::make(64), cfg);
  REQUIRE(r.report.converged);
  const auto solved = bmo_profile(r.u, {}, 0.5, lt);
  for (std::size_t k = 0; k < solved.levels.size(); ++k) {
    CHECK(std::isfinite(solved.levels[k].value));
    CHECK(solved.levels[k].value >= 0.0);
    if (k > 0 && solved.levels[k - 1].value > 1e-12) CHECK(solved.levels[k].value / solved.levels[k - 1].value <= 10.0);
  }
}

TEST_CASE("every diagnostic vanishes on admissible quadratics", "[property]") {
  auto g = HalfDiskGrid::make(128);
  struct Case {
    EllipticOperator op;
    std::function<double(Point)> u;
  };
  // Each quadratic satisfies F(D^2 P) = 1 for its operator.
  const std::vector<Case> cases{
      {EllipticOperator::linear_trace(), [](Point p) { return p.x1 * p.x2 + 0.5 * p.x2 * p.x2; }},
      {EllipticOperator::pucci_minus({1.0, 2.0}), [](Point p) { return 0.5 * p.x2 * p.x2; }},
      {EllipticOperator::pucci_plus({1.0, 2.0}), [](Point p) { return 0.25 * p.x2 * p.x2; }},
  };
  for (const auto& c : cases) {
    const auto u = ScalarField::sample(g, c.u);
    const auto prof = dyadic_profile(u, {}, 0.5, c.op);
    CHECK(prof.constant <= 1e-10);
    CHECK(prof.max_increment <= 1e-10);
    CHECK(bmo_profile(u, prof, {}).max_value <= 1e-10);
  }
}

TEST_CASE("c11_sup examples", "[c11]") {
  auto g = HalfDiskGrid::make(64);
  const auto tilted = c11_sup(ScalarField::sample(g, [](Point p) { return p.x1 * p.x2 + p.x2 * p.x2; }), 0.5);
  CHECK(tilted == Approx(oracle::spectral_norm({0.0, 1.0, 2.0})).margin(1e-9));
  CHECK(tilted == Approx(1.0 + std::sqrt(2.0)).margin(1e-9));
  CHECK(c11_sup(ScalarField::sample(g, [](Point p) { return 0.5 * p.x2 * p.x2; }), 0.5) == Approx(1.0).margin(1e-9));
  CHECK(c11_sup(ScalarField(g, 0.0), 0.5) == 0.0);
  REQUIRE_THROWS_AS(c11_sup(ScalarField(g, 0.0), 1.0), ValidationError);
}

TEST_CASE("dyadic CSV has one row per level", "[io]") {
  auto g = HalfDiskGrid::make(64);
  const auto lt = EllipticOperator::linear_trace();
  const auto u = ScalarField::sample(g, cubic_perturbed);
  const auto d = dyadic_profile(u, {}, 0.5, lt);
  const auto dir = std::filesystem::temp_directory_path() / "fblab_tests";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "dyadic.csv").string();
  write_dyadic_csv(path, d, bmo_profile(u, d, {}));
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,rho_k,misfit,scaled_misfit,increment,bmo");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == d.levels.size());
}
