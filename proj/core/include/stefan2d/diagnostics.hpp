/// Weighted energy and dissipation functionals, the trajectory norm proxy,
/// conservation and boundary-sign probes.
///
/// Discretization of the order ladders: interior derivatives run to total
/// order 4 (Cartesian and mu-weighted tangential), boundary ladders of h run
/// to order 6, and one time derivative is taken by substituting the equation
/// (q_t from the pulled-back heat operator, h_t from the front law, v_t from
/// differentiating v = -A^T grad q).  Cartesian ladders of time-differentiated
/// quantities stop one order earlier: their seventh composed chart derivative
/// is dominated by pole roundoff and would poison the integrals.
#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "stefan2d/field.hpp"
#include "stefan2d/grid.hpp"

namespace stefan2d {

struct StefanState;

/// One diagnostics record per accepted step.  The first eleven fields are the
/// CSV columns; the rest feed tests and the acceptance checks.
struct DiagnosticsRow {
  double t = 0.0;
  double chi = 0.0;        // inf over Gamma of -d_N q
  double E_disc = 0.0;
  double D_disc = 0.0;
  double S_proxy = 0.0;
  double conserved = 0.0;  // integral of (q + 1) J
  double max_q = 0.0;
  double h_l2 = 0.0;
  double h_h45 = 0.0;      // H^{4.5} norm of h
  double beta_hat = 0.0;   // running decay-rate fit of max_q over [t/2, t]
  double qt_sign = 0.0;    // inf over Gamma of d_N (q - q_prev)/dt

  // extras (not CSV columns)
  double area = 0.0;       // integral of J alone
  double q_l2 = 0.0;
  double q_h4 = 0.0;       // all Cartesian orders <= 4
  double e_boundary = 0.0; // boundary ladder of h inside E (no time term)
};

/// inf over Gamma of the inward flux -d_N q.
double chi(const Field& q);

/// integral of (q + 1) J over the reference domain; constant in time for the
/// coupled flow up to discretization error.
double conserved_heat(const StefanState& s);

/// Term groups of the energy (or dissipation) functional.  "comb" terms pair
/// a derivative of q with the same derivative of Psi contracted with v.
struct EnergyBreakdown {
  double tangential_v = 0.0;   // mu-weighted tangential ladder of v, v_t
  double boundary_h = 0.0;     // (-d_N q) Lambda^2 ladder of h
  double boundary_ht = 0.0;    // same ladder of h_t
  double tangential_comb = 0.0;
  double cartesian_v = 0.0;    // (1-mu)-weighted full-derivative ladder
  double cartesian_comb = 0.0;
  double total = 0.0;
};

struct EnergyDissipation {
  EnergyBreakdown energy;       // total carries the global factor 1/2
  EnergyBreakdown dissipation;  // plain sum
};

/// Both functionals from one pass over the derivative ladders.
EnergyDissipation energy_dissipation(const StefanState& s);
EnergyBreakdown energy_disc(const StefanState& s);
EnergyBreakdown dissipation_disc(const StefanState& s);

/// inf over Gamma of d_N((q_now - q_prev)/dt); positive once the flux decays
/// monotonically along the boundary.
double qt_boundary_sign(const Field& q_now, const Field& q_prev, double dt);

/// Least-squares decay rate of y against t on the window [t0, t1]:
/// log y = c - rate t.  Requires positive samples and at least two points
/// in the window.
double decay_fit(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1);

/// sqrt of the sum of squared L2 norms of all Cartesian derivatives of
/// order <= 4.
double h4_norm(const Field& u);

/// Initial-data stiffness ratio K = |q0|_{H^4} / |q0|_{L^2}.
double K_ratio(const Field& q0);

/// Margin of the boundary sign condition: min(-d_N q0) - cstar * c1.
struct RayleighTaylorCheck {
  bool satisfied = false;
  double margin = 0.0;
};
RayleighTaylorCheck rayleigh_taylor_check(const Field& q0, double c1, double cstar);

/// Folds states into the running trajectory norm and emits rows.  Feed the
/// initial state with previous = nullptr (its row gets beta_hat = qt_sign = 0),
/// then each accepted step with its predecessor.
class DiagnosticsAccumulator {
 public:
  /// beta = 2 lambda - eta weights the exponential-growth term of S.
  DiagnosticsAccumulator(GridPtr g, double lambda, double eta);
  DiagnosticsRow ingest(const StefanState& state, const StefanState* previous);

 private:
  GridPtr grid_;
  double beta_;
  // running sup / integral pieces of S (the exponential term is kept in log
  // space so long horizons cannot overflow)
  double sup_q_h4_ = 0.0, sup_qt_h4_ = 0.0;
  double log_sup_ebeta_q_h4_ = -std::numeric_limits<double>::infinity();
  double int_q_h4_ = 0.0, int_qt_h4_ = 0.0, int_tang_v_ = 0.0, int_ht_h5_ = 0.0;
  double sup_h_h6_ = 0.0, sup_ht_h4_ = 0.0, sup_h_h45_ = 0.0;
  // previous integrands for the trapezoid rule
  double prev_t_ = 0.0;
  double prev_q_h4_ = 0.0, prev_qt_h4_ = 0.0, prev_tang_v_ = 0.0, prev_ht_h5_ = 0.0;
  bool have_prev_ = false;
  // max_q history for the running decay fit
  std::vector<double> ts_, max_qs_;
};

}  // namespace stefan2d
