#include "stefan2d/gauge.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "stefan2d/derivatives.hpp"

namespace stefan2d {

GaugeSolver::GaugeSolver(GridPtr g) : grid_(std::move(g)), laplace_(grid_, EllipticCoefficients(grid_)) {}

namespace {

Field extend_component(const EllipticSolver& laplace, const GridPtr& g, const BoundaryField& bc,
                       const Field* warm) {
  Field zero(g);
  EllipticSolution sol = laplace.solve(zero, bc, warm);
  if (!sol.converged) {
    std::ostringstream os;
    os << "harmonic extension stalled at residual " << sol.residual;
    throw std::runtime_error(os.str());
  }
  return sol.u;
}

}  // namespace

GaugeState GaugeSolver::make(const BoundaryField& h, const BoundaryField& ht,
                             const GaugeState* warm) const {
  const Grid& g = *grid_;
  const int nr = g.nr(), nth = g.nth();
  GaugeState gs;

  if (h.max_abs() == 0.0) {
    // Exact identity map; keeps the base state free of solver noise.
    gs.psi1 = Field(grid_);
    gs.psi2 = Field(grid_);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nth; ++j) {
        gs.psi1(i, j) = g.x(i, j);
        gs.psi2(i, j) = g.y(i, j);
      }
  } else {
    BoundaryField g1(grid_), g2(grid_);
    for (int j = 0; j < nth; ++j) {
      g1[j] = g.x(nr - 1, j) + h[j] * g.normal_x(j);
      g2[j] = g.y(nr - 1, j) + h[j] * g.normal_y(j);
    }
    gs.psi1 = extend_component(laplace_, grid_, g1, warm ? &warm->psi1 : nullptr);
    gs.psi2 = extend_component(laplace_, grid_, g2, warm ? &warm->psi2 : nullptr);
  }

  if (ht.max_abs() == 0.0) {
    gs.psit1 = Field(grid_);
    gs.psit2 = Field(grid_);
  } else {
    BoundaryField g1(grid_), g2(grid_);
    for (int j = 0; j < nth; ++j) {
      g1[j] = ht[j] * g.normal_x(j);
      g2[j] = ht[j] * g.normal_y(j);
    }
    gs.psit1 = extend_component(laplace_, grid_, g1, warm ? &warm->psit1 : nullptr);
    gs.psit2 = extend_component(laplace_, grid_, g2, warm ? &warm->psit2 : nullptr);
  }

  Gradient d1 = gradient(gs.psi1);
  Gradient d2 = gradient(gs.psi2);

  gs.jac = Field(grid_);
  gs.a11 = Field(grid_);
  gs.a12 = Field(grid_);
  gs.a21 = Field(grid_);
  gs.a22 = Field(grid_);
  double min_jac = std::numeric_limits<double>::infinity();
  bool degenerate = false;
  for (std::size_t n = 0; n < gs.jac.v.size(); ++n) {
    double j11 = d1.x.v[n], j12 = d1.y.v[n];
    double j21 = d2.x.v[n], j22 = d2.y.v[n];
    double det = j11 * j22 - j12 * j21;
    gs.jac.v[n] = det;
    if (std::isnan(det)) degenerate = true;
    else min_jac = std::min(min_jac, det);
    double inv = 1.0 / det;
    gs.a11.v[n] = j22 * inv;
    gs.a12.v[n] = -j12 * inv;
    gs.a21.v[n] = -j21 * inv;
    gs.a22.v[n] = j11 * inv;
  }
  if (degenerate || min_jac <= 0.0) {
    std::ostringstream os;
    os << "gauge map degenerate: min J = " << min_jac;
    throw GaugeBreakdown(os.str(), min_jac, 0.0);
  }

  gs.lambda = BoundaryField(grid_);
  gs.atn1 = BoundaryField(grid_);
  gs.atn2 = BoundaryField(grid_);
  double min_lambda = std::numeric_limits<double>::infinity();
  for (int j = 0; j < nth; ++j) {
    double n1 = g.normal_x(j), n2 = g.normal_y(j);
    double b11 = gs.a11(nr - 1, j), b12 = gs.a12(nr - 1, j);
    double b21 = gs.a21(nr - 1, j), b22 = gs.a22(nr - 1, j);
    // (A^T N)_i = sum_k a_ki N_k
    double t1 = b11 * n1 + b21 * n2;
    double t2 = b12 * n1 + b22 * n2;
    gs.atn1[j] = t1;
    gs.atn2[j] = t2;
    double lam = n1 * t1 + n2 * t2;
    gs.lambda[j] = lam;
    min_lambda = std::min(min_lambda, lam);
  }
  if (min_lambda <= 0.0 || std::isnan(min_lambda)) {
    std::ostringstream os;
    os << "gauge boundary factor lost positivity: min Lambda = " << min_lambda;
    throw GaugeBreakdown(os.str(), gs.jac.min(), min_lambda);
  }

  return gs;
}

Field harmonic_extension(const BoundaryField& g) {
  EllipticCoefficients lap(g.grid);
  EllipticSolver solver(g.grid, lap);
  Field zero(g.grid);
  EllipticSolution sol = solver.solve(zero, g);
  if (!sol.converged) throw std::runtime_error("harmonic_extension: solve failed");
  return sol.u;
}

std::pair<BoundaryField, BoundaryField> moving_normal(const GaugeState& gs) {
  BoundaryField n1(gs.lambda.grid), n2(gs.lambda.grid);
  for (std::size_t j = 0; j < n1.v.size(); ++j) {
    double norm = std::hypot(gs.atn1.v[j], gs.atn2.v[j]);
    n1.v[j] = gs.atn1.v[j] / norm;
    n2.v[j] = gs.atn2.v[j] / norm;
  }
  return {n1, n2};
}

}  // namespace stefan2d
