/// Pucci extremal operators M-/M+ on 2x2 Hessians, their first half-eigenpairs
/// via Howard policy iteration, and the subsolution / chi lower-bound audits
/// built on top of them.
#pragma once

#include <vector>

#include "stefan2d/field.hpp"
#include "stefan2d/grid.hpp"
#include "stefan2d/stefan.hpp"

namespace stefan2d {

struct PucciParams {
  double mu1 = 1.0;   // lower ellipticity bound
  double mu2 = 1.0;   // upper ellipticity bound
  double gamma = 0.0; // optional drift bound, |b| <= gamma

  void validate() const;  // throws std::invalid_argument unless 0 < mu1 <= mu2, gamma >= 0
};

// Pointwise extremal values of a symmetric 2x2 matrix H = [hxx hxy; hxy hyy].
// M- puts mu1 on nonnegative eigenvalues and mu2 on negative ones; M+ is the
// supremum counterpart.  The drift term lives in the Field versions below.
double pucci_minus_matrix(double hxx, double hxy, double hyy, const PucciParams& p);
double pucci_plus_matrix(double hxx, double hxy, double hyy, const PucciParams& p);

// Field versions on the discrete Hessian, including the drift contribution
// -gamma |grad u| for M- and +gamma |grad u| for M+.
Field pucci_minus(const Field& u, const PucciParams& p);
Field pucci_plus(const Field& u, const PucciParams& p);

struct PolicyResult {
  Field u;
  int iterations = 0;     // outer policy iterations
  double residual = 0.0;  // max over interior nodes of |M(u) + f|
  bool damped = false;    // cycle detection forced damped updates
};

// Solve -M-(u) = f (dual = true switches to M+) with u = 0 on the boundary.
// Howard iteration: freeze the extremal coefficients of the current iterate,
// solve the resulting linear Dirichlet problem, repeat.
PolicyResult policy_solve(const Field& f, const PucciParams& p, bool dual = false,
                          const Field* warm = nullptr);

struct HalfEigenpair {
  double lambda = 0.0;
  Field rho;              // positive in the interior, normalized to max = 1
  int iterations = 0;
  double residual = 0.0;  // max over interior nodes of |M-(rho) + lambda rho|
  bool damped = false;
};

// First positive half-eigenpair of -M- via inverse power iteration with the
// bulk-median Rayleigh estimator.
HalfEigenpair half_eigenpair(const PucciParams& p, const GridPtr& g);

struct NegativeHalfEigenpair {
  double lambda = 0.0;
  Field rho;              // negative in the interior, normalized to min = -1
  int iterations = 0;
  double residual = 0.0;
};

// Second branch: rho < 0 with -M-(rho) = lambda rho, computed as the positive
// half-eigenpair of the dual operator and negated.
NegativeHalfEigenpair negative_half_eigenpair(const PucciParams& p, const GridPtr& g);

// Residual of v(t,x) = e^{-lambda1 t} rho1(x) as a subsolution of the frozen
// coefficient operator d/dt - (a_kj d_kj + b_k d_k): returns the max over
// interior nodes of (-lambda1 rho1 - a:D^2 rho1 - b.grad rho1), which is
// nonpositive up to solver tolerance whenever the coefficients lie inside the
// declared class.  Throws std::domain_error, naming the worst node, if the
// pointwise coefficient eigenvalues leave [mu1, mu2] or |b| exceeds gamma.
double subsolution_residual(double lambda1, const Field& rho1, const HeatCoefficients& coeffs,
                            const PucciParams& p);

struct ChiBoundAudit {
  double c = 0.0;      // smallest ratio chi(t) / (c1 e^{-(lambda1 + eta/4) t})
  double t_min = 0.0;  // time at which the smallest ratio occurs
  double floor = 0.0;
  bool pass = false;   // c >= floor
};

// Audit of the boundary-weight lower bound chi(t) >= c c1 e^{-(lambda1+eta/4)t}.
ChiBoundAudit chi_bound_audit(const std::vector<double>& t, const std::vector<double>& chi_series,
                              double lambda1, double c1, double eta, double floor);

}  // namespace stefan2d
