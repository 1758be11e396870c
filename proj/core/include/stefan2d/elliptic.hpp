/// Variable-coefficient elliptic solve on a star-shaped domain.
///
/// The operator is  L u = a11 u_xx + 2 a12 u_xy + a22 u_yy + b1 u_x + b2 u_y + c u
/// with Dirichlet data on the boundary ring.  Interior rows are scaled by s^2
/// before solving so the rows near the pole stay O(1); the reported residual
/// is the max norm of the scaled system.
///
/// The solver is restarted GMRES, right-preconditioned by a per-Fourier-mode
/// direct factorization of the angular average of the operator.  For a disk
/// with angle-independent isotropic coefficients the preconditioner equals the
/// operator and the iteration converges immediately; general coefficients cost
/// a handful of iterations.
#pragma once

#include <memory>
#include <vector>

#include "stefan2d/field.hpp"
#include "stefan2d/grid.hpp"

namespace stefan2d {

struct EllipticCoefficients {
  Field a11, a12, a22, b1, b2, c;

  // Laplacian defaults: a11 = a22 = 1, everything else zero.
  explicit EllipticCoefficients(GridPtr g)
      : a11(g, 1.0), a12(g, 0.0), a22(g, 1.0), b1(g, 0.0), b2(g, 0.0), c(g, 0.0) {}
};

struct EllipticSolution {
  Field u;
  double residual = 0.0;  // max-norm residual of the scaled system
  int iterations = 0;
  bool converged = false;
};

struct SolverOptions {
  double rtol = 1e-10;  // residual tolerance relative to max(|f|, |g|)
  int restart = 40;
  int max_iterations = 400;
};

class EllipticSolver {
 public:
  using Options = SolverOptions;

  EllipticSolver(GridPtr grid, const EllipticCoefficients& co, Options opt = {});
  ~EllipticSolver();

  EllipticSolver(const EllipticSolver&) = delete;
  EllipticSolver& operator=(const EllipticSolver&) = delete;

  // Pointwise L u over the whole grid, boundary ring included (one-sided
  // radial stencils there).  No row scaling.
  Field apply(const Field& u) const;

  EllipticSolution solve(const Field& f, const BoundaryField& g,
                         const Field* warm_start = nullptr) const;

  const GridPtr& grid() const { return grid_; }

 private:
  struct Precond;

  void apply_scaled(const std::vector<double>& u, std::vector<double>& out) const;

  GridPtr grid_;
  Options opt_;
  // Combined coefficient tables for the chart derivatives.
  std::vector<double> c_ss_, c_st_, c_tt_, c_s_, c_t_, c_0_;
  std::unique_ptr<Precond> pre_;
};

// One-shot Poisson convenience: solve Laplacian u = f, u = g on the boundary.
EllipticSolution solve_poisson(const Field& f, const BoundaryField& g);

}  // namespace stefan2d
