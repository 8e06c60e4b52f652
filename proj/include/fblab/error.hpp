#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace fblab {

/// Raised when an input violates a documented precondition
/// (asymmetric matrix, bad bounds, malformed scenario field, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a point or radius falls outside the discrete domain.
class DomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
};

inline double norm(Point p) { return std::hypot(p.x1, p.x2); }
inline Point operator-(Point a, Point b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
inline Point operator+(Point a, Point b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
inline Point operator*(double s, Point p) { return {s * p.x1, s * p.x2}; }

}  // namespace fblab
