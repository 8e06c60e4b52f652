#include "fblab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include <Eigen/Dense>

namespace fblab {

double QuadraticPolynomial::operator()(Point x) const {
  const double d1 = x.x1 - center.x1, d2 = x.x2 - center.x2;
  return value + gradient.x1 * d1 + gradient.x2 * d2 +
         0.5 * (hessian(0, 0) * d1 * d1 + 2.0 * hessian(0, 1) * d1 * d2 + hessian(1, 1) * d2 * d2);
}

namespace {

// t with F(H + t A, x0) = target; F(H + tA) is increasing in t.
double solve_along(const EllipticOperator& op, const SymMatrix& h, const SymMatrix& a, Point x0, double target) {
  auto g = [&](double t) { return op.evaluate(h + t * a, x0) - target; };
  double lo = -1.0, hi = 1.0;
  while (g(lo) > 0.0) lo *= 2.0;
  while (g(hi) < 0.0) hi *= 2.0;
  double t = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double glo = g(lo), ghi = g(hi);
    // Secant inside the bracket, bisection as a guard.
    t = lo - glo * (hi - lo) / (ghi - glo);
    if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
    const double gt = g(t);
    if (std::abs(gt) <= 1e-12 * (1.0 + std::abs(target))) break;
    if (gt < 0.0) lo = t;
    else hi = t;
    if (hi - lo <= 1e-15 * (1.0 + std::abs(t))) break;
  }
  return t;
}

}  // namespace

LocalFit fit_local_quadratic(const ScalarField& u, Point x0, double r, std::optional<FitConstraint> constraint) {
  if (!(r > 0.0)) throw ValidationError("fit radius must be positive");
  const auto& g = u.grid();
  std::vector<std::size_t> nodes;
  for (std::size_t k : u.restrict_to(r, x0))
    if (u.valid(k)) nodes.push_back(k);
  if (nodes.size() < 15) {
    throw ValidationError("local quadratic fit needs at least 15 nodes (got " + std::to_string(nodes.size()) + ")");
  }
  const Eigen::Index m = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd basis(m, 6);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index row = 0; row < m; ++row) {
    const Point p = g.point(nodes[row]);
    const double d1 = (p.x1 - x0.x1) / r, d2 = (p.x2 - x0.x2) / r;
    basis.row(row) << 1.0, d1, d2, d1 * d1, d1 * d2, d2 * d2;
    rhs(row) = u[nodes[row]];
  }
  const Eigen::VectorXd c = basis.colPivHouseholderQr().solve(rhs);
  const double r2 = r * r;

  LocalFit fit;
  fit.nodes = nodes.size();
  auto& poly = fit.poly;
  poly.center = x0;
  poly.value = c(0);
  poly.gradient = {c(1) / r, c(2) / r};
  poly.hessian = SymMatrix::two_by_two(2.0 * c(3) / r2, c(4) / r2, 2.0 * c(5) / r2);

  if (constraint && constraint->op) {
    const auto& op = *constraint->op;
    const SymMatrix a = op.linearize(poly.hessian, x0);
    const double t = solve_along(op, poly.hessian, a, x0, constraint->target);
    poly.hessian = poly.hessian + t * a;
    // Refit the affine part with the Hessian held fixed.
    Eigen::MatrixXd affine = basis.leftCols(3);
    Eigen::VectorXd rest(m);
    for (Eigen::Index row = 0; row < m; ++row) {
      const Point p = g.point(nodes[row]);
      const double d1 = p.x1 - x0.x1, d2 = p.x2 - x0.x2;
      rest(row) = rhs(row) - 0.5 * (poly.hessian(0, 0) * d1 * d1 + 2.0 * poly.hessian(0, 1) * d1 * d2 +
                                    poly.hessian(1, 1) * d2 * d2);
    }
    const Eigen::VectorXd ca = affine.colPivHouseholderQr().solve(rest);
    poly.value = ca(0);
    poly.gradient = {ca(1) / r, ca(2) / r};
  }

  for (std::size_t k : nodes) fit.misfit = std::max(fit.misfit, std::abs(u[k] - poly(g.point(k))));
  return fit;
}

DyadicProfile dyadic_profile(const ScalarField& u, Point x0, double rho, const EllipticOperator& op, double target) {
  if (!(rho > 0.0 && rho < 1.0)) throw ValidationError("rho must lie in (0, 1)");
  if (std::abs(x0.x2) > 1e-12) throw ValidationError("dyadic profile center must lie on the flat boundary");
  const double h = u.grid().h();
  DyadicProfile prof;
  prof.rho = rho;
  const FitConstraint constraint{&op, target};
  for (int k = 0;; ++k) {
    const double radius = std::pow(rho, k);
    if (radius < 8.0 * h * (1.0 - 1e-12)) break;
    DyadicLevel lvl;
    lvl.k = k;
    lvl.radius = radius;
    const LocalFit fit = fit_local_quadratic(u, x0, radius, constraint);
    lvl.poly = fit.poly;
    lvl.misfit = fit.misfit;
    lvl.nodes = fit.nodes;
    lvl.scaled_misfit = fit.misfit / (radius * radius);
    lvl.hessian_norm = fit.poly.hessian.spectral_norm();
    if (!prof.levels.empty()) lvl.increment = (fit.poly.hessian - prof.levels.back().poly.hessian).spectral_norm();
    prof.levels.push_back(lvl);
  }
  double coarse = 0.0;
  for (const auto& lvl : prof.levels) {
    prof.constant = std::max(prof.constant, lvl.scaled_misfit);
    prof.max_increment = std::max(prof.max_increment, lvl.increment);
    if (lvl.k <= 1) coarse = std::max(coarse, lvl.scaled_misfit);
  }
  prof.uniform_constant = prof.constant <= 2.0 * coarse + 1e-12;
  return prof;
}

BmoProfile bmo_profile(const ScalarField& u, const DyadicProfile& dyadic, Point x0) {
  const auto& g = u.grid();
  const auto hess = u.hessian();
  BmoProfile out;
  for (const auto& lvl : dyadic.levels) {
    BmoLevel b;
    b.k = lvl.k;
    b.radius = 0.5 * lvl.radius;
    double sum = 0.0;
    for (std::size_t k : u.restrict_to(b.radius, x0)) {
      if (!g.is_interior(k)) continue;
      const SymMatrix d = hess.at(k) - lvl.poly.hessian;
      const double f = d.frobenius_norm();
      sum += f * f;
      ++b.nodes;
    }
    if (b.nodes == 0) continue;
    b.value = sum / static_cast<double>(b.nodes);
    out.max_value = std::max(out.max_value, b.value);
    out.levels.push_back(b);
  }
  return out;
}

BmoProfile bmo_profile(const ScalarField& u, Point x0, double rho, const EllipticOperator& op, double target) {
  return bmo_profile(u, dyadic_profile(u, x0, rho, op, target), x0);
}

double c11_sup(const ScalarField& u, double radius, Point center) {
  const auto& g = u.grid();
  if (radius > 1.0 - 2.0 * g.h() + 1e-12) throw ValidationError("c11_sup radius must be at most 1 - 2h");
  const auto hess = u.hessian();
  double best = 0.0;
  for (std::size_t k : u.restrict_to(radius, center))
    if (g.is_interior(k)) best = std::max(best, hess.at(k).spectral_norm());
  return best;
}

void write_dyadic_csv(const std::string& path, const DyadicProfile& dyadic, const BmoProfile& bmo) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "k,rho_k,misfit,scaled_misfit,increment,bmo\n" << std::setprecision(17);
  for (const auto& lvl : dyadic.levels) {
    double b = 0.0;
    for (const auto& bl : bmo.levels)
      if (bl.k == lvl.k) b = bl.value;
    out << lvl.k << ',' << lvl.radius << ',' << lvl.misfit << ',' << lvl.scaled_misfit << ',' << lvl.increment << ','
        << b << '\n';
  }
}

}  // namespace fblab
