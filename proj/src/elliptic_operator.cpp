#include "fblab/elliptic_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fblab/simd/pucci2.hpp"

namespace fblab {

void EllipticityBounds::validate() const {
  if (!(lambda0 > 0.0) || !(lambda1 >= lambda0) || !std::isfinite(lambda1)) {
    throw ValidationError("ellipticity bounds must satisfy 0 < lambda0 <= lambda1 (got " +
                          std::to_string(lambda0) + ", " + std::to_string(lambda1) + ")");
  }
}

void HolderDependence::validate() const {
  if (!(cbar >= 0.0) || !std::isfinite(cbar)) throw ValidationError("x-dependence cbar must be >= 0");
  if (!(alphabar > 0.0 && alphabar <= 1.0)) throw ValidationError("x-dependence alphabar must lie in (0, 1]");
}

double HolderDependence::factor(Point x) const { return 1.0 + cbar * std::pow(norm(x), alphabar); }

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::LinearTrace: return "linear-trace";
    case OperatorKind::PucciPlus: return "pucci-plus";
    case OperatorKind::PucciMinus: return "pucci-minus";
    case OperatorKind::BellmanMin: return "bellman-min";
    case OperatorKind::CustomTable: return "custom-table";
  }
  return "unknown";
}

OperatorKind operator_kind_from_string(std::string_view name) {
  for (auto k : {OperatorKind::LinearTrace, OperatorKind::PucciPlus, OperatorKind::PucciMinus,
                 OperatorKind::BellmanMin, OperatorKind::CustomTable}) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError("unknown operator kind '" + std::string(name) + "'");
}

namespace {

// Pucci value through the eigenvalues; `positive_weight` multiplies the
// positive part and `negative_weight` the negative part.
double pucci_general(const SymMatrix& m, double positive_weight, double negative_weight) {
  if (m.dim() == 2) {
    // Same closed form as the batch kernels.
    const double half_gap = 0.5 * (m(0, 0) - m(1, 1));
    const double mean = 0.5 * (m(0, 0) + m(1, 1));
    const double r = std::sqrt(half_gap * half_gap + m(0, 1) * m(0, 1));
    const double hi = mean + r, lo = mean - r;
    return (hi > 0.0 ? positive_weight : negative_weight) * hi +
           (lo > 0.0 ? positive_weight : negative_weight) * lo;
  }
  double s = 0.0;
  for (double e : eigen(m).values) s += (e > 0.0 ? positive_weight : negative_weight) * e;
  return s;
}

}  // namespace

double pucci_plus(const SymMatrix& m, const EllipticityBounds& b) {
  b.validate();
  return pucci_general(m, b.lambda1, b.lambda0);
}

double pucci_minus(const SymMatrix& m, const EllipticityBounds& b) {
  b.validate();
  return pucci_general(m, b.lambda0, b.lambda1);
}

EllipticOperator::EllipticOperator(OperatorKind kind, EllipticityBounds bounds, int dim)
    : kind_(kind), bounds_(bounds), dim_(dim) {
  bounds_.validate();
  if (dim < 1 || dim > SymMatrix::kMaxDim) throw ValidationError("operator dimension must be in [1, 3]");
}

EllipticOperator EllipticOperator::linear_trace(EllipticityBounds bounds, int dim) {
  return EllipticOperator(OperatorKind::LinearTrace, bounds, dim);
}

EllipticOperator EllipticOperator::pucci_plus(EllipticityBounds bounds, int dim) {
  return EllipticOperator(OperatorKind::PucciPlus, bounds, dim);
}

EllipticOperator EllipticOperator::pucci_minus(EllipticityBounds bounds, int dim) {
  return EllipticOperator(OperatorKind::PucciMinus, bounds, dim);
}

EllipticOperator EllipticOperator::bellman_min(EllipticityBounds bounds, std::vector<SymMatrix> family) {
  if (family.empty()) throw ValidationError("bellman-min needs at least one coefficient matrix");
  EllipticOperator op(OperatorKind::BellmanMin, bounds, family.front().dim());
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& a = family[i];
    if (a.dim() != op.dim_) throw ValidationError("bellman-min family has mixed dimensions");
    const auto ev = eigen(a).values;
    const double slack = 1e-12 * (1.0 + bounds.lambda1);
    if (ev.front() < bounds.lambda0 - slack || ev.back() > bounds.lambda1 + slack) {
      throw ValidationError("bellman-min coefficient " + std::to_string(i) +
                            " violates lambda0*I <= A <= lambda1*I");
    }
  }
  op.family_ = std::move(family);
  return op;
}

EllipticOperator EllipticOperator::custom_table(EllipticityBounds bounds, std::vector<SymMatrix> table,
                                                TableCombine combine) {
  if (table.empty()) throw ValidationError("custom-table needs at least one coefficient matrix");
  EllipticOperator op(OperatorKind::CustomTable, bounds, table.front().dim());
  for (const auto& a : table) {
    if (a.dim() != op.dim_) throw ValidationError("custom-table has mixed dimensions");
  }
  op.family_ = std::move(table);
  op.combine_ = combine;
  return op;
}

EllipticOperator EllipticOperator::with_x_dependence(HolderDependence dep) const {
  dep.validate();
  EllipticOperator copy = *this;
  copy.x_dep_ = dep;
  return copy;
}

double EllipticOperator::holder_constant() const {
  if (!x_dep_) return 0.0;
  double lipschitz = 1.0;
  switch (kind_) {
    case OperatorKind::LinearTrace: lipschitz = 1.0; break;
    case OperatorKind::PucciPlus:
    case OperatorKind::PucciMinus: lipschitz = bounds_.lambda1; break;
    case OperatorKind::BellmanMin:
    case OperatorKind::CustomTable:
      lipschitz = 0.0;
      for (const auto& a : family_) lipschitz = std::max(lipschitz, a.spectral_norm());
      break;
  }
  return x_dep_->cbar * lipschitz;
}

void EllipticOperator::check_dim(const SymMatrix& m) const {
  if (m.dim() != dim_) {
    throw ValidationError("matrix dimension " + std::to_string(m.dim()) + " does not match operator dimension " +
                          std::to_string(dim_));
  }
}

std::size_t EllipticOperator::select_member(const SymMatrix& m) const {
  const bool take_max = kind_ == OperatorKind::CustomTable && combine_ == TableCombine::Max;
  std::vector<double> values(family_.size());
  double best = take_max ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < family_.size(); ++i) {
    values[i] = trace_product(family_[i], m);
    best = take_max ? std::max(best, values[i]) : std::min(best, values[i]);
  }
  const double tol = tie_tolerance(m.max_abs()) * (1.0 + bounds_.lambda1);
  std::size_t chosen = family_.size();
  for (std::size_t i = 0; i < family_.size(); ++i) {
    if (std::abs(values[i] - best) > tol) continue;
    if (chosen == family_.size() || family_[i].trace() > family_[chosen].trace()) chosen = i;
  }
  return chosen;
}

double EllipticOperator::evaluate_unscaled(const SymMatrix& m) const {
  switch (kind_) {
    case OperatorKind::LinearTrace: return m.trace();
    case OperatorKind::PucciPlus: return fblab::pucci_plus(m, bounds_);
    case OperatorKind::PucciMinus: return fblab::pucci_minus(m, bounds_);
    case OperatorKind::BellmanMin:
    case OperatorKind::CustomTable: {
      const bool take_max = kind_ == OperatorKind::CustomTable && combine_ == TableCombine::Max;
      double best = trace_product(family_.front(), m);
      for (std::size_t i = 1; i < family_.size(); ++i) {
        const double v = trace_product(family_[i], m);
        best = take_max ? std::max(best, v) : std::min(best, v);
      }
      return best;
    }
  }
  return 0.0;
}

double EllipticOperator::evaluate(const SymMatrix& m, Point x) const {
  check_dim(m);
  return x_factor(x) * evaluate_unscaled(m);
}

SymMatrix EllipticOperator::linearize_unscaled(const SymMatrix& m) const {
  switch (kind_) {
    case OperatorKind::LinearTrace: return SymMatrix::identity(dim_);
    case OperatorKind::PucciPlus:
    case OperatorKind::PucciMinus: {
      const bool plus = kind_ == OperatorKind::PucciPlus;
      if (dim_ == 2) {
        const auto p = simd::pucci2(plus ? simd::PucciSign::Plus : simd::PucciSign::Minus, bounds_.lambda0,
                                    bounds_.lambda1, m(0, 0), m(0, 1), m(1, 1));
        return SymMatrix::two_by_two(p.a11, p.a12, p.a22);
      }
      auto es = eigen(m);
      const double tol = tie_tolerance(m.max_abs());
      for (double& e : es.values) {
        if (plus) e = e < -tol ? bounds_.lambda0 : bounds_.lambda1;
        else e = e > tol ? bounds_.lambda0 : bounds_.lambda1;
      }
      return reconstruct(es, dim_);
    }
    case OperatorKind::BellmanMin:
    case OperatorKind::CustomTable: return family_[select_member(m)];
  }
  return SymMatrix::identity(dim_);
}

SymMatrix EllipticOperator::linearize(const SymMatrix& m, Point x) const {
  check_dim(m);
  return x_factor(x) * linearize_unscaled(m);
}

}  // namespace fblab
