#include "stefan2d/stefan.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "stefan2d/derivatives.hpp"
#include "stefan2d/domain.hpp"

namespace stefan2d {

Field make_initial_data(const SimConfig& cfg, const GridPtr& g) {
  Field q(g);
  const double b = cfg.b();
  for (int i = 0; i < g->nr(); ++i)
    for (int j = 0; j < g->nth(); ++j) {
      double s = g->s(i);
      double w = 1.0 - s * s;
      q(i, j) = cfg.a * w + b * w * w +
                cfg.delta * std::pow(s, cfg.k) * w * w * std::cos(cfg.k * g->theta(j));
    }
  for (int i = 0; i + 1 < g->nr(); ++i)
    for (int j = 0; j < g->nth(); ++j)
      if (!(q(i, j) > 0.0)) {
        std::ostringstream os;
        os << "initial data not positive at node (" << i << ", " << j << "): q = " << q(i, j);
        throw std::invalid_argument(os.str());
      }
  return q;
}

HeatCoefficients coefficients(const GaugeState& gs) {
  const GridPtr& g = gs.a11.grid;
  Gradient d11 = gradient(gs.a11);
  Gradient d12 = gradient(gs.a12);
  Gradient d21 = gradient(gs.a21);
  Gradient d22 = gradient(gs.a22);

  HeatCoefficients hc{Field(g), Field(g), Field(g), Field(g), Field(g)};
  const std::size_t n = hc.a11.v.size();
  for (std::size_t m = 0; m < n; ++m) {
    double A11 = gs.a11.v[m], A12 = gs.a12.v[m];
    double A21 = gs.a21.v[m], A22 = gs.a22.v[m];
    hc.a11.v[m] = A11 * A11 + A12 * A12;
    hc.a12.v[m] = A11 * A21 + A12 * A22;
    hc.a22.v[m] = A21 * A21 + A22 * A22;
    // b_k = A^k_{i,j} A^j_i + A^k_i Psit_i
    hc.b1.v[m] = d11.x.v[m] * A11 + d11.y.v[m] * A21 + d12.x.v[m] * A12 + d12.y.v[m] * A22 +
                 A11 * gs.psit1.v[m] + A12 * gs.psit2.v[m];
    hc.b2.v[m] = d21.x.v[m] * A11 + d21.y.v[m] * A21 + d22.x.v[m] * A12 + d22.y.v[m] * A22 +
                 A21 * gs.psit1.v[m] + A22 * gs.psit2.v[m];
  }
  return hc;
}

std::pair<Field, Field> velocity(const Field& q, const GaugeState& gs) {
  Gradient dq = gradient(q);
  Field v1(q.grid), v2(q.grid);
  for (std::size_t m = 0; m < q.v.size(); ++m) {
    v1.v[m] = -(gs.a11.v[m] * dq.x.v[m] + gs.a21.v[m] * dq.y.v[m]);
    v2.v[m] = -(gs.a12.v[m] * dq.x.v[m] + gs.a22.v[m] * dq.y.v[m]);
  }
  return {std::move(v1), std::move(v2)};
}

BoundaryField boundary_speed(const Field& v1, const Field& v2, const GaugeState& gs) {
  const Grid& g = *v1.grid;
  const int last = g.nr() - 1;
  BoundaryField out(v1.grid);
  for (int j = 0; j < g.nth(); ++j)
    out[j] = (v1(last, j) * gs.atn1[j] + v2(last, j) * gs.atn2[j]) / gs.lambda[j];
  return out;
}

BoundaryStep boundary_step(const BoundaryField& h, const BoundaryField& ht, double dt) {
  const GridPtr& g = h.grid;
  BoundaryField raw(g);
  for (int j = 0; j < g->nth(); ++j) raw[j] = h[j] + dt * ht[j];

  auto modes = raw.modes();
  const int mcut = g->nth() / 3;  // keep the lower two thirds of the band
  for (std::size_t m = 0; m < modes.size(); ++m)
    if (static_cast<int>(m) > mcut) modes[m] = 0.0;
  BoundaryField filtered = BoundaryField::from_modes(g, modes);
  double delta = 0.0, scale = 1.0;
  for (int j = 0; j < g->nth(); ++j) {
    delta = std::max(delta, std::abs(filtered[j] - raw[j]));
    scale = std::max(scale, std::abs(raw[j]));
  }
  // Band-limited data passes through untouched so that steady states are
  // exact fixed points; the transform round-trip alone would smear roundoff.
  if (delta <= 1e-14 * scale) return {std::move(raw), 0.0};
  return {std::move(filtered), delta};
}

namespace {

EllipticCoefficients heat_operator_coefficients(const GridPtr& g, const HeatCoefficients& hc,
                                                double dt) {
  EllipticCoefficients ec(g);
  if (dt > 0.0) {
    ec.a11 = hc.a11;
    ec.a12 = hc.a12;  // the operator applies 2 a12 d_xy, matching both cross terms
    ec.a22 = hc.a22;
    ec.b1 = hc.b1;
    ec.b2 = hc.b2;
    for (double& c : ec.c.v) c = -1.0 / dt;
  }
  return ec;  // dt = 0 leaves the (unused) Laplacian defaults
}

}  // namespace

HeatOperator::HeatOperator(GridPtr g, const HeatCoefficients& hc, double dt, double rtol)
    : grid_(std::move(g)),
      dt_(dt),
      solver_(grid_, heat_operator_coefficients(grid_, hc, dt), [&] {
        SolverOptions o;
        o.rtol = rtol;
        return o;
      }()) {
  if (dt < 0.0) throw std::invalid_argument("HeatOperator: negative dt");
}

Field HeatOperator::step(const Field& q, const Field* warm) const {
  if (dt_ == 0.0) return q;
  Field f = (-1.0 / dt_) * q;
  BoundaryField zero(grid_);
  EllipticSolution sol = solver_.solve(f, zero, warm);
  if (!sol.converged) {
    std::ostringstream os;
    os << "heat step stalled at residual " << sol.residual;
    throw std::runtime_error(os.str());
  }
  return sol.u;
}

StefanSim::StefanSim(const SimConfig& cfg)
    : cfg_(cfg), grid_(build_grid(StarDomain::disk(1.0, cfg.rho, cfg.sigma), cfg.nr, cfg.nth)),
      gauge_(grid_) {
  if (cfg.nr < 8 || cfg.nth < 8) throw std::invalid_argument("StefanSim: grid too small");
  if (cfg.dt <= 0.0) throw std::invalid_argument("StefanSim: dt must be positive");
  if (cfg.t_end < 0.0) throw std::invalid_argument("StefanSim: negative t_end");
}

StefanState StefanSim::initial_state() const {
  StefanState st;
  st.t = 0.0;
  st.q = make_initial_data(cfg_, grid_);
  BoundaryField h0(grid_), zero(grid_);
  GaugeState flat = gauge_.make(h0, zero);  // identity map, A = Id exactly
  auto [v1, v2] = velocity(st.q, flat);
  st.v1 = std::move(v1);
  st.v2 = std::move(v2);
  st.ht = boundary_speed(st.v1, st.v2, flat);
  st.h = h0;
  st.gauge = gauge_.make(h0, st.ht);
  st.coeffs = coefficients(st.gauge);
  return st;
}

StefanState StefanSim::step(const StefanState& s) const {
  BoundaryStep bs = boundary_step(s.h, s.ht, cfg_.dt);
  GaugeState gnew = gauge_.make(bs.h, s.ht, &s.gauge);
  HeatCoefficients coeffs = coefficients(gnew);
  HeatOperator heat(grid_, coeffs, cfg_.dt, cfg_.rtol);

  StefanState out;
  out.t = s.t + cfg_.dt;
  out.q = heat.step(s.q, &s.q);
  auto [v1, v2] = velocity(out.q, gnew);
  out.v1 = std::move(v1);
  out.v2 = std::move(v2);
  out.h = bs.h;
  out.ht = boundary_speed(out.v1, out.v2, gnew);
  out.gauge = std::move(gnew);
  out.coeffs = std::move(coeffs);
  out.filter_delta = bs.filter_delta;
  return out;
}

RunResult StefanSim::run(const StepObserver& observer, const RowObserver& on_row) const {
  RunResult res;
  res.config = cfg_;

  EigenPair eig = dirichlet_eigenpair(grid_);
  res.lambda = eig.lambda;
  res.eta = cfg_.eta_frac * eig.lambda;

  StefanState state = initial_state();
  res.c1 = c1(state.q, eig.phi);
  res.K = K_ratio(state.q);
  res.T_K = cfg_.cbar * std::log(res.K);

  DiagnosticsAccumulator accum(grid_, res.lambda, res.eta);
  res.row0 = accum.ingest(state, nullptr);
  if (on_row) on_row(res.row0);
  if (observer) observer(state, 0);

  const long nsteps = std::lround(cfg_.t_end / cfg_.dt);
  res.termination = "t_end_reached";
  for (long n = 1; n <= nsteps; ++n) {
    StefanState next;
    try {
      next = step(state);
    } catch (const GaugeBreakdown& e) {
      res.termination = std::string("gauge_breakdown: ") + e.what();
      break;
    } catch (const std::runtime_error& e) {
      res.termination = std::string("solver_failure: ") + e.what();
      break;
    }
    next.t = static_cast<double>(n) * cfg_.dt;
    res.max_filter_delta = std::max(res.max_filter_delta, next.filter_delta);
    for (std::size_t m = 0; m < next.coeffs.a11.v.size(); ++m) {
      double mid = 0.5 * (next.coeffs.a11.v[m] + next.coeffs.a22.v[m]);
      double rad = std::hypot(0.5 * (next.coeffs.a11.v[m] - next.coeffs.a22.v[m]),
                              next.coeffs.a12.v[m]);
      res.max_a_dev = std::max(res.max_a_dev, std::abs(mid - 1.0) + rad);
      res.max_b_norm =
          std::max(res.max_b_norm, std::hypot(next.coeffs.b1.v[m], next.coeffs.b2.v[m]));
    }
    DiagnosticsRow row = accum.ingest(next, &state);
    if (on_row) on_row(row);
    res.rows.push_back(row);
    state = std::move(next);
    if (observer) observer(state, static_cast<int>(n));
    if (!std::isfinite(row.max_q) || !std::isfinite(row.E_disc)) {
      res.termination = "non_finite_state";
      break;
    }
  }
  res.final_state = std::move(state);
  res.eigen = std::move(eig);
  return res;
}

}  // namespace stefan2d
