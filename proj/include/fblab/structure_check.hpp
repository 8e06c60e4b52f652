#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fblab/elliptic_operator.hpp"

namespace fblab {

/// Seeded sampler shared by the structure checks. Doubles come straight
/// from the 64-bit engine so streams are identical across standard libraries.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi);
  SymMatrix symmetric(int dim, double scale);
  /// Uniform point of the open half ball B_1^+.
  Point half_ball_point();

 private:
  std::mt19937_64 engine_;
};

struct Witness {
  SymMatrix m;
  SymMatrix n;
  Point x;
  Point y;
};

struct HypothesisResult {
  std::string name;
  bool checked = false;
  bool passed = true;
  /// Smallest slack seen; negative means a violation of that size.
  double worst_margin = 0.0;
  std::optional<Witness> witness;
};

enum class ConvexityShape { Affine, Concave, Convex, Neither };
std::string to_string(ConvexityShape shape);

struct StructureReport {
  std::uint64_t seed = 0;
  int samples = 0;
  double tolerance = 1e-9;
  HypothesisResult h1, h2, h3, h4;
  ConvexityShape shape = ConvexityShape::Neither;

  bool passes_h1_to_h3() const { return h1.passed && h2.passed && h3.passed; }
  bool all_passed() const { return passes_h1_to_h3() && h4.passed; }
};

/// Sampled verification of H1 (F(0,x)=0), H2 (Pucci sandwich), H3 (midpoint
/// concavity or convexity) and, for x-dependent operators, H4. A violation
/// beyond `tolerance` marks the hypothesis failed; nothing is thrown.
StructureReport check_structure(const EllipticOperator& op, int samples, std::uint64_t seed,
                                double tolerance = 1e-9);

/// Sampled sup over M of |F(M,x) - F(M,x0)| / (|M| + 1) with |M| the
/// nuclear norm. Exactly 0 for x-independent operators. Samples form a fixed
/// seeded sequence, so the value is nondecreasing in `samples`.
double x_modulus_beta(const EllipticOperator& op, Point x, Point x0, int samples,
                      std::uint64_t seed = 0x5eedbe7aULL);

}  // namespace fblab
