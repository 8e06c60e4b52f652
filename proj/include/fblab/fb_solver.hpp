#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fblab/elliptic_operator.hpp"
#include "fblab/scalar_field.hpp"

namespace fblab {

enum class SolveMode { Dirichlet, Obstacle, Nosign };
std::string to_string(SolveMode mode);
SolveMode solve_mode_from_string(const std::string& name);

using Datum = std::function<double(Point)>;

struct SolverConfig {
  SolveMode mode = SolveMode::Dirichlet;
  /// Off-Omega Hessian bound; only reported.
  double K = 10.0;
  int max_outer_iters = 100;
  double newton_damping = 1.0;
  double residual_tol = 1e-8;
  /// Active-set thresholds; unset means h^2/16 and h/(2 sqrt(lambda0 lambda1)).
  std::optional<double> active_set_tol_u;
  std::optional<double> active_set_tol_grad;
  double linear_tol = 1e-10;
  int structure_samples = 256;
  std::uint64_t structure_seed = 0x0b57ac1eULL;

  void validate() const;
  double tol_u(const HalfDiskGrid& grid) const;
  double tol_grad(const HalfDiskGrid& grid, const EllipticOperator& op) const;
};

/// Omega as a mask over grid nodes; only interior nodes can be members.
struct ActiveSet {
  GridPtr grid;
  std::vector<bool> member;

  explicit ActiveSet(GridPtr g = nullptr) : grid(std::move(g)) {
    if (grid) member.assign(grid->size(), false);
  }
  bool contains(std::size_t id) const { return member[id]; }
  std::size_t count() const;
  bool operator==(const ActiveSet& o) const { return member == o.member; }
};

/// {|u| > tol_u} or {|grad u| > tol_grad}, over interior nodes.
ActiveSet threshold_active_set(const ScalarField& u, double tol_u, double tol_grad);

struct SolveReport {
  bool converged = false;
  std::string status;  // converged | max-iterations | oscillating | inconsistent-datum
  double pde_residual = 0.0;
  double complementarity_residual = 0.0;
  double min_value = 0.0;
  double off_omega_hessian_max = 0.0;
  double K = 0.0;
  bool hessian_within_K = true;
  int outer_iterations = 0;
  int newton_steps = 0;
  int picard_steps = 0;
  long linear_iterations = 0;
  double tol_u = 0.0;
  double tol_grad = 0.0;
  double residual_tol = 0.0;
  std::size_t omega_size = 0;
  /// Nosign mode: the two alternating sets when the iteration cycles.
  std::optional<std::pair<ActiveSet, ActiveSet>> oscillation;
};

struct SolveResult {
  ScalarField u;
  ActiveSet active;
  SolveReport report;
};

/// F(D^2 u) = f at interior nodes, u = g on arc and flat boundary nodes.
/// Throws ValidationError if the operator fails the structure checks or is not 2D.
SolveResult solve_dirichlet(const EllipticOperator& op, const ScalarField& f, const Datum& g, GridPtr grid,
                            const SolverConfig& cfg = {});

/// min(1 - F(D^2 u), u) = 0 at interior nodes with arc datum g >= 0.
SolveResult solve_obstacle(const EllipticOperator& op, const Datum& g, GridPtr grid, const SolverConfig& cfg = {});

/// Active-set fixed point for the sign-free problem with F(D^2 u) = 1 on Omega.
/// The first Omega comes from g extended into the interior.
SolveResult solve_nosign(const EllipticOperator& op, const Datum& g, GridPtr grid, const SolverConfig& cfg = {});

/// Dispatch on cfg.mode with f = 1.
SolveResult solve(const EllipticOperator& op, const Datum& g, GridPtr grid, const SolverConfig& cfg);

struct NondegeneracyEntry {
  double r;
  double value;  // sup over the half circle of u / r^2
};

/// Radii whose half circle leaves the half disk are omitted.
std::vector<NondegeneracyEntry> nondegeneracy_profile(const ScalarField& u, Point center,
                                                      const std::vector<double>& radii, int samples = 1024);

}  // namespace fblab
