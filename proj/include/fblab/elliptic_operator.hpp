#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fblab/error.hpp"
#include "fblab/sym_matrix.hpp"

namespace fblab {

struct EllipticityBounds {
  double lambda0 = 1.0;
  double lambda1 = 1.0;

  /// Throws ValidationError unless 0 < lambda0 <= lambda1.
  void validate() const;
};

/// Hölder x-dependence F(M, x) = (1 + cbar |x|^alphabar) F0(M).
struct HolderDependence {
  double cbar = 0.0;
  double alphabar = 1.0;

  void validate() const;
  double factor(Point x) const;
};

enum class OperatorKind { LinearTrace, PucciPlus, PucciMinus, BellmanMin, CustomTable };
enum class TableCombine { Min, Max };

std::string_view to_string(OperatorKind kind);
OperatorKind operator_kind_from_string(std::string_view name);

double pucci_plus(const SymMatrix& m, const EllipticityBounds& bounds);
double pucci_minus(const SymMatrix& m, const EllipticityBounds& bounds);

/// A fully nonlinear map on symmetric matrices. Immutable after
/// construction; evaluate/linearize are pure.
///
/// Kinds:
///  - linear-trace:  F(M) = trace(M)
///  - pucci-plus / pucci-minus: extremal operators for the bounds
///  - bellman-min: F(M) = min_i trace(A_i M), each A_i within the bounds
///  - custom-table: F(M) = min_i or max_i trace(C_i M), no constraint on C_i
///    (used to exercise the structure checker on arbitrary operators)
class EllipticOperator {
 public:
  static EllipticOperator linear_trace(EllipticityBounds bounds = {1.0, 1.0}, int dim = 2);
  static EllipticOperator pucci_plus(EllipticityBounds bounds, int dim = 2);
  static EllipticOperator pucci_minus(EllipticityBounds bounds, int dim = 2);
  static EllipticOperator bellman_min(EllipticityBounds bounds, std::vector<SymMatrix> family);
  static EllipticOperator custom_table(EllipticityBounds bounds, std::vector<SymMatrix> table,
                                       TableCombine combine = TableCombine::Min);

  EllipticOperator with_x_dependence(HolderDependence dep) const;

  OperatorKind kind() const { return kind_; }
  const EllipticityBounds& bounds() const { return bounds_; }
  int dim() const { return dim_; }
  const std::vector<SymMatrix>& family() const { return family_; }
  TableCombine combine() const { return combine_; }
  const std::optional<HolderDependence>& x_dependence() const { return x_dep_; }

  double x_factor(Point x) const { return x_dep_ ? x_dep_->factor(x) : 1.0; }

  /// Constant in |F(M,x) - F(M,y)| <= C (|M| + 1) |x - y|^alphabar implied by
  /// the x-dependence: cbar times sup |F0(M)| / |M| (nuclear norm). Zero
  /// without x-dependence.
  double holder_constant() const;

  double evaluate(const SymMatrix& m, Point x = {}) const;

  /// Coefficients F_ij(M). At eigenvalue ties (Pucci) the tied block gets
  /// the lambda1 weight; at policy ties (bellman/custom) the tied member
  /// with the largest trace wins, then the lowest index.
  SymMatrix linearize(const SymMatrix& m, Point x = {}) const;

 private:
  EllipticOperator(OperatorKind kind, EllipticityBounds bounds, int dim);

  void check_dim(const SymMatrix& m) const;
  double evaluate_unscaled(const SymMatrix& m) const;
  SymMatrix linearize_unscaled(const SymMatrix& m) const;
  std::size_t select_member(const SymMatrix& m) const;

  OperatorKind kind_;
  EllipticityBounds bounds_;
  int dim_;
  std::vector<SymMatrix> family_;
  TableCombine combine_ = TableCombine::Min;
  std::optional<HolderDependence> x_dep_;
};

}  // namespace fblab
