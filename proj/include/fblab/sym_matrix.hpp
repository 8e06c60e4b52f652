#pragma once

#include <array>
#include <initializer_list>
#include <vector>

namespace fblab {

/// Real symmetric matrix of dimension 1..3. Symmetry holds by construction;
/// only from_rows() accepts a general array and validates it.
class SymMatrix {
 public:
  static constexpr int kMaxDim = 3;

  SymMatrix() : SymMatrix(2) {}
  explicit SymMatrix(int dim);

  static SymMatrix zero(int dim) { return SymMatrix(dim); }
  static SymMatrix identity(int dim, double scale = 1.0);
  static SymMatrix diag(std::initializer_list<double> entries);
  static SymMatrix two_by_two(double a11, double a12, double a22);
  /// Throws ValidationError unless rows form a square symmetric array
  /// (entries compared to 1e-12 relative).
  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows);

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return a_[i * kMaxDim + j]; }
  void set(int i, int j, double v) {
    a_[i * kMaxDim + j] = v;
    a_[j * kMaxDim + i] = v;
  }

  double trace() const;
  double max_abs() const;
  double frobenius_norm() const;
  double spectral_norm() const;
  /// Sum of absolute eigenvalues.
  double nuclear_norm() const;

  std::vector<std::vector<double>> rows() const;

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

 private:
  int dim_;
  std::array<double, kMaxDim * kMaxDim> a_{};
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);

/// trace(A B) for symmetric A, B of equal dimension.
double trace_product(const SymMatrix& a, const SymMatrix& b);

/// Max-entry distance.
double max_entry_distance(const SymMatrix& a, const SymMatrix& b);

/// Absolute threshold below which an eigenvalue counts as tied with zero.
inline double tie_tolerance(double max_abs_entry) { return 1e-9 * (1.0 + max_abs_entry); }

struct Eigensystem {
  std::vector<double> values;                   // ascending
  std::vector<std::array<double, 3>> vectors;   // vectors[k] pairs with values[k]
};

/// Eigendecomposition. 2x2 uses the closed form, 3x3 uses Eigen's
/// self-adjoint solver.
Eigensystem eigen(const SymMatrix& m);

/// basis * diag(values) * basis^T
SymMatrix reconstruct(const Eigensystem& es, int dim);

}  // namespace fblab
