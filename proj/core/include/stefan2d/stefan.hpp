/// One-phase Stefan stepping in the harmonic gauge: pullback heat solve,
/// explicit front motion, gauge refresh.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stefan2d/diagnostics.hpp"
#include "stefan2d/eigenpair.hpp"
#include "stefan2d/elliptic.hpp"
#include "stefan2d/gauge.hpp"

namespace stefan2d {

struct SimConfig {
  int nr = 64;
  int nth = 64;
  double dt = 1e-3;
  double t_end = 2.0;
  double a = 0.1;       // amplitude of the radial part of the initial data
  double delta = 0.02;  // amplitude of the mode-k perturbation
  int k = 3;            // angular mode of the perturbation
  double eta_frac = 0.1;  // eta as a fraction of the principal eigenvalue
  double cbar = 1.0;      // horizon constant in T_K = cbar ln K
  double cstar = 1.0;     // constant in the boundary sign condition
  double rho = 0.3;       // cutoff plateau radius
  double sigma = 0.2;     // cutoff transition width
  double rtol = 1e-10;    // relative tolerance of the linear solves
  int snapshot_stride = 200;

  // Compatibility coefficient of the quartic part, tied to a so the initial
  // boundary flux is uniform: b = a(1-a)/2.
  double b() const { return 0.5 * a * (1.0 - a); }
};

/// Coefficients of the pulled-back heat operator a_kj d_kj + b_k d_k
/// (a12 holds the common off-diagonal value).
struct HeatCoefficients {
  Field a11, a12, a22, b1, b2;
};

struct StefanState {
  double t = 0.0;
  Field q;
  Field v1, v2;  // pullback velocity -A^T grad q
  BoundaryField h, ht;
  GaugeState gauge;
  HeatCoefficients coeffs;  // non-divergence coefficients of the current gauge
  double filter_delta = 0.0;  // what the mode filter removed in the step that made this state
};

/// q0 = a(1-s^2) + b(1-s^2)^2 + delta s^k (1-s^2)^2 cos(k theta) in the
/// normalized radius s.  Rejects data that is not positive inside.
Field make_initial_data(const SimConfig& cfg, const GridPtr& g);

/// Non-divergence coefficients of the pulled-back heat operator:
/// a_kj = A^k_i A^j_i and b_k = A^k_{i,j} A^j_i + A^k_i Psit_i.
HeatCoefficients coefficients(const GaugeState& gs);

/// v = -A^T grad q.
std::pair<Field, Field> velocity(const Field& q, const GaugeState& gs);

/// Front speed (v . A^T N) / Lambda on Gamma.
BoundaryField boundary_speed(const Field& v1, const Field& v2, const GaugeState& gs);

struct BoundaryStep {
  BoundaryField h;
  double filter_delta;  // max change the spectral filter made
};

/// Explicit Euler update of h followed by a low-pass cut of the top third of
/// the angular modes.
BoundaryStep boundary_step(const BoundaryField& h, const BoundaryField& ht, double dt);

/// Backward Euler heat solve (I - dt (a d2 + b d1)) q_new = q with zero
/// boundary values.  dt = 0 returns q unchanged.
class HeatOperator {
 public:
  HeatOperator(GridPtr g, const HeatCoefficients& hc, double dt, double rtol = 1e-10);
  Field step(const Field& q, const Field* warm = nullptr) const;
  const EllipticSolver& solver() const { return solver_; }

 private:
  GridPtr grid_;
  double dt_;
  EllipticSolver solver_;
};

struct RunResult {
  SimConfig config;
  std::vector<DiagnosticsRow> rows;  // one per step, t = dt..t_end
  DiagnosticsRow row0;               // diagnostics of the initial state
  std::string termination;           // "t_end_reached", "gauge_breakdown: ...", ...
  StefanState final_state;
  EigenPair eigen;
  double lambda = 0.0;
  double eta = 0.0;
  double c1 = 0.0;        // first eigen coefficient of q0
  double K = 0.0;         // H^4/L^2 ratio of q0
  double T_K = 0.0;       // cbar ln K
  double max_filter_delta = 0.0;
  double max_a_dev = 0.0;   // largest spectral deviation of a_kj from the identity
  double max_b_norm = 0.0;  // largest |b| over nodes and steps
};

class StefanSim {
 public:
  explicit StefanSim(const SimConfig& cfg);

  const GridPtr& grid() const { return grid_; }
  const SimConfig& config() const { return cfg_; }
  const GaugeSolver& gauge_solver() const { return gauge_; }

  StefanState initial_state() const;
  /// One step: velocity, front update, gauge velocity extension, gauge
  /// refresh, coefficients, heat solve.  Throws GaugeBreakdown if the new
  /// front leaves the gauge unusable.
  StefanState step(const StefanState& s) const;

  /// Observer is called with the state and step index (0 = initial state)
  /// after each accepted step; diagnostics rows cover steps 1..N.
  using StepObserver = std::function<void(const StefanState&, int)>;
  using RowObserver = std::function<void(const DiagnosticsRow&)>;
  RunResult run(const StepObserver& observer = {}, const RowObserver& on_row = {}) const;

 private:
  SimConfig cfg_;
  GridPtr grid_;
  GaugeSolver gauge_;
};

}  // namespace stefan2d
