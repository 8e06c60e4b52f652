#pragma once

// Independent reference computations shared by the test suites. None of
// these call into the library's numerical routines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "fblab/sym_matrix.hpp"

namespace oracle {

struct Mat2 {
  double a = 0.0, b = 0.0, c = 0.0;  // [[a, b], [b, c]]
};

inline Mat2 of(const fblab::SymMatrix& m) { return {m(0, 0), m(0, 1), m(1, 1)}; }

inline double trace_product(const Mat2& n, const Mat2& m) { return n.a * m.a + 2.0 * n.b * m.b + n.c * m.c; }

// R diag(d1, d2) R^T with R the rotation by theta.
inline Mat2 rotated_diagonal(double theta, double d1, double d2) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {d1 * c * c + d2 * s * s, (d1 - d2) * c * s, d1 * s * s + d2 * c * c};
}

struct Extremes {
  double sup = -std::numeric_limits<double>::infinity();
  double inf = std::numeric_limits<double>::infinity();
};

// Extremes of trace(N M) over `samples` admissible N = R diag(d) R^T with
// d in [l0, l1]^2: a uniform angle sweep at the four corner weightings plus
// seeded interior weightings.
inline Extremes brute_force_pucci(const Mat2& m, double l0, double l1, int samples, std::uint64_t seed = 7) {
  Extremes e;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> w(l0, l1);
  const int sweep = samples / 5;
  const double corners[4][2] = {{l0, l0}, {l0, l1}, {l1, l0}, {l1, l1}};
  for (int k = 0; k < sweep; ++k) {
    const double theta = std::numbers::pi * k / sweep;
    for (const auto& d : corners) {
      const double v = trace_product(rotated_diagonal(theta, d[0], d[1]), m);
      e.sup = std::max(e.sup, v);
      e.inf = std::min(e.inf, v);
    }
    const double v = trace_product(rotated_diagonal(theta, w(rng), w(rng)), m);
    e.sup = std::max(e.sup, v);
    e.inf = std::min(e.inf, v);
  }
  return e;
}

inline Mat2 random_mat2(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

inline fblab::SymMatrix to_sym(const Mat2& m) { return fblab::SymMatrix::two_by_two(m.a, m.b, m.c); }

// Eigenvalues of a 2x2 symmetric matrix from the characteristic polynomial.
inline std::pair<double, double> eigenvalues(const Mat2& m) {
  const double tr = m.a + m.c, det = m.a * m.c - m.b * m.b;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return {tr / 2.0 - disc, tr / 2.0 + disc};
}

inline double spectral_norm(const Mat2& m) {
  const auto [lo, hi] = eigenvalues(m);
  return std::max(std::abs(lo), std::abs(hi));
}

// Area of {x2 <= t} inside the upper half disk of radius s (t <= s).
inline double lower_band_area(double s, double t) {
  const double full = std::numbers::pi * s * s / 2.0;
  const double segment = s * s * std::acos(t / s) - t * std::sqrt(s * s - t * t);
  return full - segment;
}

// Gauss-Legendre rule on [-1, 1] with n points via Newton on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) {
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        break;
      }
    }
  }
}

}  // namespace oracle
