#include "fblab/sym_matrix.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fblab/error.hpp"

namespace fblab {

SymMatrix::SymMatrix(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw ValidationError("SymMatrix dimension must be in [1, 3], got " + std::to_string(dim));
  }
}

SymMatrix SymMatrix::identity(int dim, double scale) {
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.set(i, i, scale);
  return m;
}

SymMatrix SymMatrix::diag(std::initializer_list<double> entries) {
  SymMatrix m(static_cast<int>(entries.size()));
  int i = 0;
  for (double v : entries) {
    m.set(i, i, v);
    ++i;
  }
  return m;
}

SymMatrix SymMatrix::two_by_two(double a11, double a12, double a22) {
  SymMatrix m(2);
  m.set(0, 0, a11);
  m.set(0, 1, a12);
  m.set(1, 1, a22);
  return m;
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  SymMatrix m(n);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != n) throw ValidationError("matrix rows must form a square array");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double a = rows[i][j];
      const double b = rows[j][i];
      if (!std::isfinite(a) || !std::isfinite(b)) throw ValidationError("matrix entries must be finite");
      if (std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)})) {
        throw ValidationError("matrix is not symmetric at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      }
      m.set(i, j, 0.5 * (a + b));
    }
  }
  return m;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m = std::max(m, std::abs((*this)(i, j)));
  return m;
}

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * (*this)(i, j);
  return std::sqrt(s);
}

double SymMatrix::spectral_norm() const {
  const auto es = eigen(*this);
  return std::max(std::abs(es.values.front()), std::abs(es.values.back()));
}

double SymMatrix::nuclear_norm() const {
  const auto es = eigen(*this);
  return std::accumulate(es.values.begin(), es.values.end(), 0.0,
                         [](double acc, double v) { return acc + std::abs(v); });
}

std::vector<std::vector<double>> SymMatrix::rows() const {
  std::vector<std::vector<double>> out(dim_, std::vector<double>(dim_));
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) out[i][j] = (*this)(i, j);
  return out;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  if (o.dim_ != dim_) throw ValidationError("dimension mismatch in matrix sum");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  if (o.dim_ != dim_) throw ValidationError("dimension mismatch in matrix difference");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (double& v : a_) v *= s;
  return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

double trace_product(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw ValidationError("dimension mismatch in trace product");
  double t = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) t += a(i, j) * b(j, i);
  return t;
}

double max_entry_distance(const SymMatrix& a, const SymMatrix& b) { return (a - b).max_abs(); }

Eigensystem eigen(const SymMatrix& m) {
  Eigensystem es;
  const int n = m.dim();
  if (n == 1) {
    es.values = {m(0, 0)};
    es.vectors = {{1.0, 0.0, 0.0}};
    return es;
  }
  if (n == 2) {
    const double a = m(0, 0), b = m(0, 1), c = m(1, 1);
    const double mean = 0.5 * (a + c);
    const double half_gap = 0.5 * (a - c);
    const double r = std::sqrt(half_gap * half_gap + b * b);
    const double theta = 0.5 * std::atan2(2.0 * b, a - c);
    const double ct = std::cos(theta), st = std::sin(theta);
    es.values = {mean - r, mean + r};
    es.vectors = {{-st, ct, 0.0}, {ct, st, 0.0}};
    return es;
  }
  Eigen::Matrix3d a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = m(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(a);
  for (int k = 0; k < 3; ++k) {
    es.values.push_back(solver.eigenvalues()(k));
    const auto v = solver.eigenvectors().col(k);
    es.vectors.push_back({v(0), v(1), v(2)});
  }
  return es;
}

SymMatrix reconstruct(const Eigensystem& es, int dim) {
  SymMatrix out(dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < es.values.size(); ++k) s += es.values[k] * es.vectors[k][i] * es.vectors[k][j];
      out.set(i, j, s);
    }
  }
  return out;
}

}  // namespace fblab
