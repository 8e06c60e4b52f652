#include "fblab/fb_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fblab/simd/kernels.hpp"
#include "fblab/stencil_solver.hpp"
#include "fblab/structure_check.hpp"

namespace fblab {

std::string to_string(SolveMode mode) {
  switch (mode) {
    case SolveMode::Dirichlet: return "dirichlet";
    case SolveMode::Obstacle: return "obstacle";
    case SolveMode::Nosign: return "nosign";
  }
  return "dirichlet";
}

SolveMode solve_mode_from_string(const std::string& name) {
  if (name == "dirichlet") return SolveMode::Dirichlet;
  if (name == "obstacle") return SolveMode::Obstacle;
  if (name == "nosign") return SolveMode::Nosign;
  throw ValidationError("unknown solver mode '" + name + "' (expected dirichlet, obstacle or nosign)");
}

void SolverConfig::validate() const {
  if (!(residual_tol > 0.0)) throw ValidationError("residual_tol must be positive");
  if (!(K > 0.0)) throw ValidationError("K must be positive");
  if (max_outer_iters < 1) throw ValidationError("max_outer_iters must be >= 1");
  if (!(newton_damping > 0.0 && newton_damping <= 1.0)) throw ValidationError("newton_damping must lie in (0, 1]");
  if (active_set_tol_u && !(*active_set_tol_u > 0.0)) throw ValidationError("active_set_tol_u must be positive");
  if (active_set_tol_grad && !(*active_set_tol_grad > 0.0)) {
    throw ValidationError("active_set_tol_grad must be positive");
  }
  if (!(linear_tol > 0.0)) throw ValidationError("linear_tol must be positive");
}

double SolverConfig::tol_u(const HalfDiskGrid& grid) const {
  return active_set_tol_u.value_or(grid.h() * grid.h() / 16.0);
}

double SolverConfig::tol_grad(const HalfDiskGrid& grid, const EllipticOperator& op) const {
  if (active_set_tol_grad) return *active_set_tol_grad;
  return grid.h() / (2.0 * std::sqrt(op.bounds().lambda0 * op.bounds().lambda1));
}

std::size_t ActiveSet::count() const { return static_cast<std::size_t>(std::count(member.begin(), member.end(), true)); }

ActiveSet threshold_active_set(const ScalarField& u, double tol_u, double tol_grad) {
  const auto& g = u.grid();
  const auto grad = u.gradient();
  ActiveSet out(u.grid_ptr());
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!g.is_interior(k)) continue;
    out.member[k] = std::abs(u[k]) > tol_u || grad.magnitude(k) > tol_grad;
  }
  return out;
}

namespace {

// F and its linearization at every interior node.
struct OperatorEval {
  std::vector<double> value, a11, a12, a22;
};

class Discretization {
 public:
  Discretization(const EllipticOperator& op, GridPtr grid) : op_(op), grid_(std::move(grid)) {
    const std::size_t n = grid_->size();
    factor_.assign(n, 1.0);
    if (op_.x_dependence()) {
      for (std::size_t k = 0; k < n; ++k) factor_[k] = op_.x_factor(grid_->point(k));
    }
  }

  const HalfDiskGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  OperatorEval evaluate(const std::vector<double>& u) const {
    const auto& g = *grid_;
    const std::size_t n = g.size();
    OperatorEval ev{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                    std::vector<double>(n, 0.0)};
    std::vector<double> hxx(n, 0.0), hxy(n, 0.0), hyy(n, 0.0);
    const auto& kern = simd::kernels();
    kern.hessian(g.nx(), g.ny(), g.h(), u.data(), hxx.data(), hxy.data(), hyy.data());

    const bool pucci = op_.kind() == OperatorKind::PucciPlus || op_.kind() == OperatorKind::PucciMinus;
    if (pucci) {
      const auto sign = op_.kind() == OperatorKind::PucciPlus ? simd::PucciSign::Plus : simd::PucciSign::Minus;
      kern.pucci(n, sign, op_.bounds().lambda0, op_.bounds().lambda1, hxx.data(), hxy.data(), hyy.data(),
                 ev.value.data(), ev.a11.data(), ev.a12.data(), ev.a22.data());
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (!g.is_interior(k)) {
        ev.value[k] = ev.a11[k] = ev.a12[k] = ev.a22[k] = 0.0;
        continue;
      }
      if (!pucci) {
        const SymMatrix m = SymMatrix::two_by_two(hxx[k], hxy[k], hyy[k]);
        if (op_.kind() == OperatorKind::LinearTrace) {
          ev.value[k] = hxx[k] + hyy[k];
          ev.a11[k] = ev.a22[k] = 1.0;
        } else {
          ev.value[k] = op_.evaluate(m);
          const SymMatrix a = op_.linearize(m);
          ev.a11[k] = a(0, 0);
          ev.a12[k] = a(0, 1);
          ev.a22[k] = a(1, 1);
        }
      }
      const double s = factor_[k];
      ev.value[k] *= s;
      ev.a11[k] *= s;
      ev.a12[k] *= s;
      ev.a22[k] *= s;
    }
    return ev;
  }

 private:
  const EllipticOperator& op_;
  GridPtr grid_;
  std::vector<double> factor_;
};

struct Counters {
  int newton = 0;
  int picard = 0;
  long linear = 0;
};

// Rows of a nonlinear system: PDE rows solve F(D^2 u) = f, others hold u = fixed.
struct RowPlan {
  std::vector<bool> pde;
  std::vector<double> fixed;
};

double pde_residual(const OperatorEval& ev, const std::vector<double>& f, const RowPlan& plan) {
  double r = 0.0;
  for (std::size_t k = 0; k < plan.pde.size(); ++k)
    if (plan.pde[k]) r = std::max(r, std::abs(ev.value[k] - f[k]));
  return r;
}

void apply_fixed(const RowPlan& plan, std::vector<double>& u) {
  for (std::size_t k = 0; k < u.size(); ++k)
    if (!plan.pde[k]) u[k] = plan.fixed[k];
}

// Damped Newton with line search and a frozen-coefficient fallback.
// Returns the final residual; u is updated in place.
double newton_solve(const Discretization& disc, const std::vector<double>& f, const RowPlan& plan,
                    std::vector<double>& u, const SolverConfig& cfg, Counters& counters, int& iterations) {
  const auto& g = disc.grid();
  const std::size_t n = g.size();
  apply_fixed(plan, u);
  OperatorEval ev = disc.evaluate(u);
  double res = pde_residual(ev, f, plan);
  iterations = 0;
  std::vector<double> delta(n), rhs(n), trial(n);
  while (res > cfg.residual_tol && iterations < cfg.max_outer_iters) {
    ++iterations;
    StencilSystem sys(g);
    for (std::size_t k = 0; k < n; ++k) {
      if (plan.pde[k]) {
        sys.set_pde_row(k, ev.a11[k], ev.a12[k], ev.a22[k]);
        rhs[k] = f[k] - ev.value[k];
      } else {
        rhs[k] = 0.0;
      }
    }
    std::fill(delta.begin(), delta.end(), 0.0);
    counters.linear += solve_linear(sys, rhs, delta, cfg.linear_tol).iterations;

    bool accepted = false;
    for (double theta = cfg.newton_damping; theta >= cfg.newton_damping / 8.0; theta *= 0.5) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = u[k] + theta * delta[k];
      apply_fixed(plan, trial);
      OperatorEval ev_trial = disc.evaluate(trial);
      const double r_trial = pde_residual(ev_trial, f, plan);
      if (r_trial <= 0.99 * res) {
        u.swap(trial);
        ev = std::move(ev_trial);
        res = r_trial;
        accepted = true;
        ++counters.newton;
        break;
      }
    }
    if (accepted) continue;

    // Frozen coefficients: trace(A_k D^2 u) = f.
    for (std::size_t k = 0; k < n; ++k) rhs[k] = plan.pde[k] ? f[k] : plan.fixed[k];
    trial = u;
    counters.linear += solve_linear(sys, rhs, trial, cfg.linear_tol).iterations;
    apply_fixed(plan, trial);
    u.swap(trial);
    ev = disc.evaluate(u);
    res = pde_residual(ev, f, plan);
    ++counters.picard;
  }
  return res;
}

void refuse_unless_structured(const EllipticOperator& op, const SolverConfig& cfg) {
  if (op.dim() != 2) throw ValidationError("the solver handles 2D operators only");
  const auto rep = check_structure(op, cfg.structure_samples, cfg.structure_seed);
  if (!rep.passes_h1_to_h3()) {
    std::string failed;
    for (const auto* h : {&rep.h1, &rep.h2, &rep.h3})
      if (!h->passed) failed += (failed.empty() ? "" : ", ") + h->name;
    throw ValidationError("operator fails structural hypotheses " + failed + "; solve refused");
  }
}

// The free boundary modes keep u = 0 on the flat boundary; plain Dirichlet
// solves take the datum there too.
RowPlan boundary_plan(const HalfDiskGrid& g, const Datum& datum, bool datum_on_flat = false) {
  RowPlan plan{std::vector<bool>(g.size(), false), std::vector<double>(g.size(), 0.0)};
  for (std::size_t k = 0; k < g.size(); ++k) {
    switch (g.kind(k)) {
      case NodeKind::Interior: plan.pde[k] = true; break;
      case NodeKind::ArcBoundary: plan.fixed[k] = datum(g.point(k)); break;
      case NodeKind::FlatBoundary: plan.fixed[k] = datum_on_flat ? datum(g.point(k)) : 0.0; break;
      case NodeKind::Exterior: plan.fixed[k] = 0.0; break;
    }
  }
  return plan;
}

// Largest spectral norm of D^2 u over interior nodes whose 3x3 block avoids Omega.
double off_omega_hessian(const ScalarField& u, const ActiveSet& omega) {
  const auto& g = u.grid();
  const auto hess = u.hessian();
  double m = 0.0;
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) {
      const std::size_t k = g.id(i, j);
      if (!g.is_interior(k)) continue;
      bool clear = true;
      for (int dj = -1; dj <= 1 && clear; ++dj)
        for (int di = -1; di <= 1; ++di)
          if (omega.contains(g.id(i + di, j + dj))) {
            clear = false;
            break;
          }
      if (clear) m = std::max(m, hess.at(k).spectral_norm());
    }
  }
  return m;
}

void finish_report(SolveReport& rep, const ScalarField& u, const ActiveSet& omega, const SolverConfig& cfg,
                   const Counters& counters) {
  rep.K = cfg.K;
  rep.residual_tol = cfg.residual_tol;
  rep.off_omega_hessian_max = off_omega_hessian(u, omega);
  rep.hessian_within_K = rep.off_omega_hessian_max <= cfg.K;
  rep.newton_steps = counters.newton;
  rep.picard_steps = counters.picard;
  rep.linear_iterations = counters.linear;
  rep.omega_size = omega.count();
  double mn = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < u.size(); ++k)
    if (!u.grid().is_exterior(k)) mn = std::min(mn, u[k]);
  rep.min_value = std::isfinite(mn) ? mn : 0.0;
}

ScalarField ones(const GridPtr& grid) { return ScalarField(grid, 1.0); }

}  // namespace

SolveResult solve_dirichlet(const EllipticOperator& op, const ScalarField& f, const Datum& g, GridPtr grid,
                            const SolverConfig& cfg) {
  cfg.validate();
  if (!grid) throw ValidationError("solve_dirichlet needs a grid");
  if (!f.grid().same_as(*grid)) throw ValidationError("right-hand side lives on a different grid");
  refuse_unless_structured(op, cfg);

  Discretization disc(op, grid);
  RowPlan plan = boundary_plan(*grid, g, true);
  std::vector<double> u(grid->size(), 0.0);
  Counters counters;
  int iters = 0;
  const double res = newton_solve(disc, f.values(), plan, u, cfg, counters, iters);

  SolveResult out{ScalarField(grid, std::move(u)), ActiveSet(grid), {}};
  for (std::size_t k = 0; k < grid->size(); ++k) out.active.member[k] = grid->is_interior(k);
  auto& rep = out.report;
  rep.pde_residual = res;
  rep.outer_iterations = iters;
  rep.converged = res <= cfg.residual_tol;
  rep.status = rep.converged ? "converged" : "max-iterations";
  finish_report(rep, out.u, out.active, cfg, counters);
  return out;
}

SolveResult solve_obstacle(const EllipticOperator& op, const Datum& g, GridPtr grid, const SolverConfig& cfg) {
  cfg.validate();
  if (!grid) throw ValidationError("solve_obstacle needs a grid");
  refuse_unless_structured(op, cfg);
  const auto& gr = *grid;
  for (std::size_t k = 0; k < gr.size(); ++k) {
    if (gr.kind(k) == NodeKind::ArcBoundary && g(gr.point(k)) < 0.0) {
      throw ValidationError("obstacle mode needs a nonnegative arc datum");
    }
  }

  Discretization disc(op, grid);
  const std::vector<double> f(gr.size(), 1.0);
  const RowPlan base = boundary_plan(gr, g);
  Counters counters;

  // Start from the unconstrained solve.
  std::vector<double> u(gr.size(), 0.0);
  int iters = 0;
  newton_solve(disc, f, base, u, cfg, counters, iters);

  auto complementarity = [&](const OperatorEval& ev, const std::vector<double>& v) {
    double r = 0.0;
    for (std::size_t k = 0; k < gr.size(); ++k)
      if (gr.is_interior(k)) r = std::max(r, std::abs(std::min(f[k] - ev.value[k], v[k])));
    return r;
  };

  // Primal-dual active set: contact rows pin u = 0, the rest solve
  // F(D^2 u) = f. A contact node is released when F exceeds f there; a free
  // node enters contact when u drops below zero.
  const double flip = 1e-3 * cfg.residual_tol;
  std::vector<bool> contact(gr.size(), false);
  for (std::size_t k = 0; k < gr.size(); ++k) contact[k] = gr.is_interior(k) && u[k] < -flip;
  OperatorEval ev = disc.evaluate(u);
  double res = complementarity(ev, u);
  int outer = 0;
  RowPlan plan = base;
  while (outer < cfg.max_outer_iters) {
    ++outer;
    for (std::size_t k = 0; k < gr.size(); ++k) {
      if (!gr.is_interior(k)) continue;
      plan.pde[k] = !contact[k];
      plan.fixed[k] = 0.0;
    }
    int inner = 0;
    newton_solve(disc, f, plan, u, cfg, counters, inner);
    ev = disc.evaluate(u);
    res = complementarity(ev, u);

    bool changed = false;
    for (std::size_t k = 0; k < gr.size(); ++k) {
      if (!gr.is_interior(k)) continue;
      const bool next = contact[k] ? ev.value[k] - f[k] <= flip : u[k] < -flip;
      if (next != contact[k]) changed = true;
      contact[k] = next;
    }
    if (!changed) break;
  }

  SolveResult out{ScalarField(grid, std::move(u)), ActiveSet(grid), {}};
  auto& rep = out.report;
  rep.tol_u = cfg.tol_u(gr);
  rep.tol_grad = cfg.tol_grad(gr, op);
  for (std::size_t k = 0; k < gr.size(); ++k) out.active.member[k] = gr.is_interior(k) && out.u[k] > rep.tol_u;
  rep.complementarity_residual = res;
  double pde = 0.0;
  for (std::size_t k = 0; k < gr.size(); ++k)
    if (out.active.member[k]) pde = std::max(pde, std::abs(ev.value[k] - f[k]));
  rep.pde_residual = pde;
  rep.outer_iterations = outer;
  rep.converged = res <= cfg.residual_tol;
  rep.status = rep.converged ? "converged" : "max-iterations";
  finish_report(rep, out.u, out.active, cfg, counters);
  if (rep.converged && rep.min_value < -cfg.residual_tol) {
    rep.converged = false;
    rep.status = "negative-solution";
  }
  return out;
}

SolveResult solve_nosign(const EllipticOperator& op, const Datum& g, GridPtr grid, const SolverConfig& cfg) {
  cfg.validate();
  if (!grid) throw ValidationError("solve_nosign needs a grid");
  refuse_unless_structured(op, cfg);
  const auto& gr = *grid;
  const double tol_u = cfg.tol_u(gr);
  const double tol_grad = cfg.tol_grad(gr, op);

  Discretization disc(op, grid);
  const std::vector<double> f(gr.size(), 1.0);
  const RowPlan base = boundary_plan(gr, g);
  bool datum_nonzero = false;
  for (std::size_t k = 0; k < gr.size(); ++k)
    if (gr.kind(k) == NodeKind::ArcBoundary && std::abs(base.fixed[k]) > tol_u) datum_nonzero = true;

  // Datum extended into the interior seeds both u and Omega.
  ScalarField seed = ScalarField::sample(grid, g);
  for (std::size_t k = 0; k < gr.size(); ++k)
    if (gr.kind(k) == NodeKind::FlatBoundary) seed[k] = 0.0;
  ActiveSet omega = threshold_active_set(seed, tol_u, tol_grad);
  std::vector<double> u = seed.values();

  Counters counters;
  SolveResult out{ScalarField(grid), ActiveSet(grid), {}};
  auto& rep = out.report;
  rep.tol_u = tol_u;
  rep.tol_grad = tol_grad;
  std::optional<ActiveSet> previous;
  double res = std::numeric_limits<double>::infinity();
  rep.status = "max-iterations";
  int outer = 0;
  while (outer < cfg.max_outer_iters) {
    ++outer;
    RowPlan plan = base;
    for (std::size_t k = 0; k < gr.size(); ++k) {
      if (!gr.is_interior(k)) continue;
      plan.pde[k] = omega.contains(k);
      plan.fixed[k] = 0.0;
    }
    int inner = 0;
    res = newton_solve(disc, f, plan, u, cfg, counters, inner);

    ActiveSet next = threshold_active_set(ScalarField(grid, u), tol_u, tol_grad);
    if (outer == 1 && next.count() == 0 && datum_nonzero) {
      rep.status = "inconsistent-datum";
      omega = next;
      break;
    }
    if (next == omega) {
      rep.status = res <= cfg.residual_tol ? "converged" : "max-iterations";
      break;
    }
    if (previous && next == *previous) {
      rep.status = "oscillating";
      rep.oscillation = std::make_pair(omega, next);
      break;
    }
    previous = omega;
    omega = std::move(next);
  }

  out.u = ScalarField(grid, std::move(u));
  out.active = omega;
  rep.pde_residual = res;
  rep.outer_iterations = outer;
  rep.converged = rep.status == "converged";
  finish_report(rep, out.u, out.active, cfg, counters);
  return out;
}

SolveResult solve(const EllipticOperator& op, const Datum& g, GridPtr grid, const SolverConfig& cfg) {
  switch (cfg.mode) {
    case SolveMode::Dirichlet: return solve_dirichlet(op, ones(grid), g, grid, cfg);
    case SolveMode::Obstacle: return solve_obstacle(op, g, grid, cfg);
    case SolveMode::Nosign: return solve_nosign(op, g, grid, cfg);
  }
  throw ValidationError("unknown solver mode");
}

std::vector<NondegeneracyEntry> nondegeneracy_profile(const ScalarField& u, Point center,
                                                      const std::vector<double>& radii, int samples) {
  if (std::abs(center.x2) > 1e-12) throw ValidationError("nondegeneracy center must lie on the flat boundary");
  if (samples < 2) throw ValidationError("nondegeneracy profile needs at least 2 samples");
  std::vector<NondegeneracyEntry> out;
  for (double r : radii) {
    if (!(r > 0.0) || std::abs(center.x1) + r > 1.0) continue;
    double best = -std::numeric_limits<double>::infinity();
    for (int s = 0; s <= samples; ++s) {
      const double theta = std::numbers::pi * s / samples;
      const Point p{center.x1 + r * std::cos(theta), r * std::sin(theta)};
      best = std::max(best, u.interpolate(p) / (r * r));
    }
    out.push_back({r, best});
  }
  return out;
}

}  // namespace fblab
