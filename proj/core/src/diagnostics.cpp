#include "stefan2d/diagnostics.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <utility>

#include "stefan2d/derivatives.hpp"
#include "stefan2d/stefan.hpp"

namespace stefan2d {

namespace {

constexpr int kInteriorOrder = 4;
constexpr int kBoundaryOrder = 6;

// ===========================================================================
// Pole mode guard
//
// At reference radius s a smooth field carries no resolvable content above
// roughly 1.5 s (n/2) angular modes; what sits there is roundoff.  The chart
// factors turn that roundoff into (m/s)^k garbage under repeated Cartesian
// differentiation, so the ladders low-pass each ring between stages.  The
// floor of 3 keeps the map components (mode 1) and low-mode physics exact.
// ===========================================================================

void pole_guard(Field& u) {
  const Grid& g = *u.grid;
  const RingTransform& ring = g.ring();
  const int nm = ring.nmodes();
  std::vector<std::complex<double>> c(nm);
  for (int i = 0; i < g.nr(); ++i) {
    int cap = std::max(3, static_cast<int>(std::ceil(1.5 * g.s(i) * (g.nth() / 2))));
    if (cap >= nm - 1) continue;
    ring.to_modes(&u.v[g.index(i, 0)], c.data());
    for (int m = cap + 1; m < nm; ++m) c[m] = 0.0;
    ring.to_ring(c.data(), &u.v[g.index(i, 0)]);
  }
}

// Cartesian ladder d[k][ay] = dx^(k-ay) dy^ay u for k <= maxk.
struct CartPyramid {
  std::vector<std::vector<Field>> d;
  const Field& at(int k, int ay) const { return d[k][ay]; }
};

CartPyramid cart_pyramid(Field u, int maxk) {
  pole_guard(u);
  CartPyramid p;
  p.d.resize(maxk + 1);
  p.d[0].push_back(std::move(u));
  for (int k = 1; k <= maxk; ++k) {
    p.d[k].reserve(k + 1);
    for (int ay = 0; ay <= k; ++ay) {
      Field f = ay == 0 ? differentiate(p.d[k - 1][0], 1, 0)
                        : differentiate(p.d[k - 1][ay - 1], 0, 1);
      pole_guard(f);
      p.d[k].push_back(std::move(f));
    }
  }
  return p;
}

// Tangential ladder t[k]; consumers weight it by mu, which vanishes where the
// 1/s factors would hurt.
std::vector<Field> tang_pyramid(const Field& u, int maxk) {
  std::vector<Field> t;
  t.reserve(maxk + 1);
  t.push_back(u);
  for (int k = 1; k <= maxk; ++k) t.push_back(interior_tangential(t.back()));
  return t;
}

struct LadderValues {
  EnergyBreakdown E, D;
  double chi = 0.0;
  double q_l2sq = 0.0, q_h4sq = 0.0, qt_h4sq = 0.0;
  double tang_v_sum = 0.0;  // mu-weighted tangential ladder of v and v_t
  double conserved = 0.0;
  double area = 0.0;
  double max_q = 0.0;
};

double weighted_sq(const Grid& g, const std::vector<double>& w, const Field& f) {
  std::vector<double> integrand(f.v.size());
  for (std::size_t n = 0; n < f.v.size(); ++n) integrand[n] = w[n] * f.v[n] * f.v[n];
  return g.integrate(integrand);
}

double weighted_sq2(const Grid& g, const std::vector<double>& w, const Field& f1,
                    const Field& f2) {
  std::vector<double> integrand(f1.v.size());
  for (std::size_t n = 0; n < f1.v.size(); ++n)
    integrand[n] = w[n] * (f1.v[n] * f1.v[n] + f2.v[n] * f2.v[n]);
  return g.integrate(integrand);
}

// Squared norm of dq + (dPsi1) v1 + (dPsi2) v2 with v pointwise.
double weighted_comb(const Grid& g, const std::vector<double>& w, const Field& dq,
                     const Field& dp1, const Field& dp2, const Field& v1, const Field& v2) {
  std::vector<double> integrand(dq.v.size());
  for (std::size_t n = 0; n < dq.v.size(); ++n) {
    double c = dq.v[n] + dp1.v[n] * v1.v[n] + dp2.v[n] * v2.v[n];
    integrand[n] = w[n] * c * c;
  }
  return g.integrate(integrand);
}

LadderValues compute_ladders(const StefanState& st) {
  const GridPtr& gp = st.q.grid;
  const Grid& g = *gp;
  const int nr = g.nr(), nth = g.nth();

  std::vector<double> mu(g.size()), omu(g.size());
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nth; ++j) {
      double m = g.mu(i, j);
      mu[g.index(i, j)] = m;
      omu[g.index(i, j)] = 1.0 - m;
    }
  std::vector<double> one(g.size(), 1.0);

  // Cartesian ladders of the state quantities
  CartPyramid Pq = cart_pyramid(st.q, kInteriorOrder);
  CartPyramid Pp1 = cart_pyramid(st.gauge.psi1, kInteriorOrder);
  CartPyramid Pp2 = cart_pyramid(st.gauge.psi2, kInteriorOrder);
  CartPyramid Ppt1 = cart_pyramid(st.gauge.psit1, kInteriorOrder);
  CartPyramid Ppt2 = cart_pyramid(st.gauge.psit2, kInteriorOrder);
  CartPyramid Pv1 = cart_pyramid(st.v1, kInteriorOrder);
  CartPyramid Pv2 = cart_pyramid(st.v2, kInteriorOrder);

  // q_t from the equation, with the coefficients of the current gauge
  Field qt(gp);
  {
    const HeatCoefficients& c = st.coeffs;
    const Field& qx = Pq.at(1, 0);
    const Field& qy = Pq.at(1, 1);
    const Field& qxx = Pq.at(2, 0);
    const Field& qxy = Pq.at(2, 1);
    const Field& qyy = Pq.at(2, 2);
    for (std::size_t n = 0; n < qt.v.size(); ++n)
      qt.v[n] = c.a11.v[n] * qxx.v[n] + 2.0 * c.a12.v[n] * qxy.v[n] + c.a22.v[n] * qyy.v[n] +
                c.b1.v[n] * qx.v[n] + c.b2.v[n] * qy.v[n];
  }
  CartPyramid Pqt = cart_pyramid(qt, kInteriorOrder);

  // v_t = A Dpsit A grad q - A^T grad q_t (from differentiating the velocity
  // law in time, with A_t = -A Dpsit A)
  Field vt1(gp), vt2(gp);
  {
    const Field& qx = Pq.at(1, 0);
    const Field& qy = Pq.at(1, 1);
    const Field& qtx = Pqt.at(1, 0);
    const Field& qty = Pqt.at(1, 1);
    const Field& d11 = Ppt1.at(1, 0);
    const Field& d12 = Ppt1.at(1, 1);
    const Field& d21 = Ppt2.at(1, 0);
    const Field& d22 = Ppt2.at(1, 1);
    const GaugeState& gs = st.gauge;
    for (std::size_t n = 0; n < vt1.v.size(); ++n) {
      double A[2][2] = {{gs.a11.v[n], gs.a12.v[n]}, {gs.a21.v[n], gs.a22.v[n]}};
      double Dt[2][2] = {{d11.v[n], d12.v[n]}, {d21.v[n], d22.v[n]}};
      double M[2][2] = {{0, 0}, {0, 0}};  // A Dt A
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
          for (int p = 0; p < 2; ++p)
            for (int r = 0; r < 2; ++r) M[k][i] += A[k][p] * Dt[p][r] * A[r][i];
      double dq[2] = {qx.v[n], qy.v[n]};
      double dqt[2] = {qtx.v[n], qty.v[n]};
      double out[2] = {0, 0};
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) out[i] += M[k][i] * dq[k] - A[k][i] * dqt[k];
      vt1.v[n] = out[0];
      vt2.v[n] = out[1];
    }
  }
  // One order lower: a fourth derivative of v_t stacks seven chart
  // derivatives on q and the pole roundoff wins.
  CartPyramid Pvt1 = cart_pyramid(vt1, kInteriorOrder - 1);
  CartPyramid Pvt2 = cart_pyramid(vt2, kInteriorOrder - 1);

  // Tangential ladders
  auto Tq = tang_pyramid(st.q, kInteriorOrder);
  auto Tqt = tang_pyramid(qt, kInteriorOrder);
  auto Tp1 = tang_pyramid(st.gauge.psi1, kInteriorOrder);
  auto Tp2 = tang_pyramid(st.gauge.psi2, kInteriorOrder);
  auto Tpt1 = tang_pyramid(st.gauge.psit1, kInteriorOrder);
  auto Tpt2 = tang_pyramid(st.gauge.psit2, kInteriorOrder);
  auto Tv1 = tang_pyramid(st.v1, kInteriorOrder);
  auto Tv2 = tang_pyramid(st.v2, kInteriorOrder);
  auto Tvt1 = tang_pyramid(vt1, kInteriorOrder);
  auto Tvt2 = tang_pyramid(vt2, kInteriorOrder);

  LadderValues L;

  // Boundary weight (-d_N q) Lambda^2 and chi
  BoundaryField dnq = normal_derivative(st.q);
  std::vector<double> bw(nth);
  L.chi = std::numeric_limits<double>::infinity();
  for (int j = 0; j < nth; ++j) {
    double flux = -dnq[j];
    L.chi = std::min(L.chi, flux);
    bw[j] = flux * st.gauge.lambda[j] * st.gauge.lambda[j];
  }
  auto boundary_ladder_term = [&](const BoundaryField& hb, int order) {
    BoundaryField d = angular_derivative(hb, order);
    std::vector<double> integrand(nth);
    for (int j = 0; j < nth; ++j) integrand[j] = bw[j] * d[j] * d[j];
    return g.integrate_boundary(integrand);
  };

  // Per-(b, order) tables; budgets below pick from them.
  double tv[2][kInteriorOrder + 1], tcomb[2][kInteriorOrder + 1];
  double cv[2][kInteriorOrder + 1], ccomb[2][kInteriorOrder + 1];
  double bh[kBoundaryOrder + 1], bht[kBoundaryOrder + 1];

  for (int k = 0; k <= kInteriorOrder; ++k) {
    tv[0][k] = weighted_sq2(g, mu, Tv1[k], Tv2[k]);
    tv[1][k] = weighted_sq2(g, mu, Tvt1[k], Tvt2[k]);
    tcomb[0][k] = weighted_comb(g, mu, Tq[k], Tp1[k], Tp2[k], st.v1, st.v2);
    tcomb[1][k] = weighted_comb(g, mu, Tqt[k], Tpt1[k], Tpt2[k], st.v1, st.v2);
    cv[0][k] = cv[1][k] = ccomb[0][k] = ccomb[1][k] = 0.0;
    for (int ay = 0; ay <= k; ++ay) {
      cv[0][k] += weighted_sq2(g, omu, Pv1.at(k, ay), Pv2.at(k, ay));
      if (k < kInteriorOrder) cv[1][k] += weighted_sq2(g, omu, Pvt1.at(k, ay), Pvt2.at(k, ay));
      ccomb[0][k] += weighted_comb(g, omu, Pq.at(k, ay), Pp1.at(k, ay), Pp2.at(k, ay), st.v1, st.v2);
      ccomb[1][k] +=
          weighted_comb(g, omu, Pqt.at(k, ay), Ppt1.at(k, ay), Ppt2.at(k, ay), st.v1, st.v2);
    }
  }
  for (int beta = 0; beta <= kBoundaryOrder; ++beta) {
    bh[beta] = boundary_ladder_term(st.h, beta);
    bht[beta] = beta <= 5 ? boundary_ladder_term(st.ht, beta) : 0.0;
  }

  auto sum = [](const double* a, int from, int to) {
    double s = 0.0;
    for (int k = from; k <= to; ++k) s += a[k];
    return s;
  };

  // Energy: order budgets |alpha| + 2b <= 5 for velocity groups and <= 6 for
  // boundary/combination groups, capped at interior order 4; one half overall.
  EnergyBreakdown& E = L.E;
  E.tangential_v = sum(tv[0], 0, 4) + sum(tv[1], 0, 3);
  E.boundary_h = sum(bh, 0, 6);
  E.boundary_ht = sum(bht, 0, 4);
  E.tangential_comb = sum(tcomb[0], 0, 4) + sum(tcomb[1], 0, 4);
  E.cartesian_v = sum(cv[0], 0, 4) + sum(cv[1], 0, 3);
  E.cartesian_comb = sum(ccomb[0], 0, 4) + sum(ccomb[1], 0, 4);
  E.total = 0.5 * (E.tangential_v + E.boundary_h + E.boundary_ht + E.tangential_comb +
                   E.cartesian_v + E.cartesian_comb);

  // Dissipation: budgets shift by one time derivative; the base quantities
  // here are v, h_t and q_t, so the second-time-derivative rungs are dropped.
  EnergyBreakdown& D = L.D;
  D.tangential_v = sum(tv[0], 0, 4) + sum(tv[1], 0, 4);
  D.boundary_h = 0.0;
  D.boundary_ht = sum(bht, 0, 5);
  D.tangential_comb = sum(tcomb[1], 0, 4);
  D.cartesian_v = sum(cv[0], 0, 4) + sum(cv[1], 0, 3);
  D.cartesian_comb = sum(ccomb[1], 0, 4);
  D.total = D.tangential_v + D.boundary_ht + D.tangential_comb + D.cartesian_v + D.cartesian_comb;

  L.tang_v_sum = D.tangential_v;

  // Plain Sobolev pieces
  L.q_l2sq = weighted_sq(g, one, Pq.at(0, 0));
  L.q_h4sq = 0.0;
  L.qt_h4sq = 0.0;
  for (int k = 0; k <= kInteriorOrder; ++k)
    for (int ay = 0; ay <= k; ++ay) {
      L.q_h4sq += weighted_sq(g, one, Pq.at(k, ay));
      L.qt_h4sq += weighted_sq(g, one, Pqt.at(k, ay));
    }

  {
    std::vector<double> integrand(g.size());
    for (std::size_t n = 0; n < integrand.size(); ++n)
      integrand[n] = (st.q.v[n] + 1.0) * st.gauge.jac.v[n];
    L.conserved = g.integrate(integrand);
    L.area = g.integrate(st.gauge.jac.v);
  }
  L.max_q = st.q.max();
  return L;
}

}  // namespace

double chi(const Field& q) {
  BoundaryField dnq = normal_derivative(q);
  double inf = std::numeric_limits<double>::infinity();
  for (double d : dnq.v) inf = std::min(inf, -d);
  return inf;
}

double conserved_heat(const StefanState& s) {
  std::vector<double> integrand(s.q.v.size());
  for (std::size_t n = 0; n < integrand.size(); ++n)
    integrand[n] = (s.q.v[n] + 1.0) * s.gauge.jac.v[n];
  return s.q.grid->integrate(integrand);
}

EnergyDissipation energy_dissipation(const StefanState& s) {
  LadderValues L = compute_ladders(s);
  return {L.E, L.D};
}

EnergyBreakdown energy_disc(const StefanState& s) { return energy_dissipation(s).energy; }

EnergyBreakdown dissipation_disc(const StefanState& s) { return energy_dissipation(s).dissipation; }

double qt_boundary_sign(const Field& q_now, const Field& q_prev, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("qt_boundary_sign: dt must be positive");
  Field diff(q_now.grid);
  for (std::size_t n = 0; n < diff.v.size(); ++n) diff.v[n] = (q_now.v[n] - q_prev.v[n]) / dt;
  BoundaryField dn = normal_derivative(diff);
  double inf = std::numeric_limits<double>::infinity();
  for (double d : dn.v) inf = std::min(inf, d);
  return inf;
}

double decay_fit(const std::vector<double>& t, const std::vector<double>& y, double t0,
                 double t1) {
  if (t.size() != y.size()) throw std::invalid_argument("decay_fit: length mismatch");
  double st = 0, sl = 0, stt = 0, stl = 0;
  std::size_t count = 0;
  for (std::size_t n = 0; n < t.size(); ++n) {
    if (t[n] < t0 || t[n] > t1) continue;
    if (!(y[n] > 0.0)) throw std::domain_error("decay_fit: nonpositive sample in window");
    double l = std::log(y[n]);
    st += t[n];
    sl += l;
    stt += t[n] * t[n];
    stl += t[n] * l;
    ++count;
  }
  if (count < 2) throw std::invalid_argument("decay_fit: fewer than two samples in window");
  double denom = count * stt - st * st;
  return (count * stl - st * sl) / denom;
}

double h4_norm(const Field& u) {
  CartPyramid p = cart_pyramid(u, kInteriorOrder);
  std::vector<double> one(u.v.size(), 1.0);
  double sq = 0.0;
  for (int k = 0; k <= kInteriorOrder; ++k)
    for (int ay = 0; ay <= k; ++ay) sq += weighted_sq(*u.grid, one, p.at(k, ay));
  return std::sqrt(sq);
}

double K_ratio(const Field& q0) {
  double den = l2_norm(q0);
  if (den == 0.0) throw std::domain_error("K_ratio: zero field");
  return h4_norm(q0) / den;
}

RayleighTaylorCheck rayleigh_taylor_check(const Field& q0, double c1, double cstar) {
  double margin = chi(q0) - cstar * c1;
  return {margin > 0.0, margin};
}

DiagnosticsAccumulator::DiagnosticsAccumulator(GridPtr g, double lambda, double eta)
    : grid_(std::move(g)), beta_(2.0 * lambda - eta) {}

DiagnosticsRow DiagnosticsAccumulator::ingest(const StefanState& state,
                                              const StefanState* previous) {
  LadderValues L = compute_ladders(state);

  DiagnosticsRow r;
  r.t = state.t;
  r.chi = L.chi;
  r.E_disc = L.E.total;
  r.D_disc = L.D.total;
  r.conserved = L.conserved;
  r.area = L.area;
  r.max_q = L.max_q;
  r.h_l2 = l2_norm_boundary(state.h);
  double h45sq = boundary_hs_sq(state.h, 4.5);
  r.h_h45 = std::sqrt(h45sq);
  r.q_l2 = std::sqrt(L.q_l2sq);
  r.q_h4 = std::sqrt(L.q_h4sq);
  r.e_boundary = L.E.boundary_h;

  // Fold into the running trajectory norm.
  double h6 = boundary_hs_sq(state.h, 6.0);
  double ht4 = boundary_hs_sq(state.ht, 4.0);
  double ht5 = boundary_hs_sq(state.ht, 5.0);
  sup_q_h4_ = std::max(sup_q_h4_, L.q_h4sq);
  sup_qt_h4_ = std::max(sup_qt_h4_, L.qt_h4sq);
  if (L.q_h4sq > 0.0)
    log_sup_ebeta_q_h4_ = std::max(log_sup_ebeta_q_h4_, beta_ * state.t + std::log(L.q_h4sq));
  sup_h_h6_ = std::max(sup_h_h6_, h6);
  sup_ht_h4_ = std::max(sup_ht_h4_, ht4);
  sup_h_h45_ = std::max(sup_h_h45_, h45sq);
  if (have_prev_) {
    double dt = state.t - prev_t_;
    int_q_h4_ += 0.5 * (prev_q_h4_ + L.q_h4sq) * dt;
    int_qt_h4_ += 0.5 * (prev_qt_h4_ + L.qt_h4sq) * dt;
    int_tang_v_ += 0.5 * (prev_tang_v_ + L.tang_v_sum) * dt;
    int_ht_h5_ += 0.5 * (prev_ht_h5_ + ht5) * dt;
  }
  prev_t_ = state.t;
  prev_q_h4_ = L.q_h4sq;
  prev_qt_h4_ = L.qt_h4sq;
  prev_tang_v_ = L.tang_v_sum;
  prev_ht_h5_ = ht5;
  have_prev_ = true;

  r.S_proxy = sup_q_h4_ + sup_qt_h4_ + int_q_h4_ + int_qt_h4_ + std::exp(log_sup_ebeta_q_h4_) +
              int_tang_v_ + L.chi * (sup_h_h6_ + sup_ht_h4_ + int_ht_h5_) +
              sup_h_h45_ * sup_h_h45_;

  // Running decay fit of max_q over the trailing half of the trajectory.
  ts_.push_back(state.t);
  max_qs_.push_back(L.max_q);
  double t0 = 0.5 * state.t;
  std::size_t in_window = 0;
  for (std::size_t n = 0; n < ts_.size(); ++n)
    if (ts_[n] >= t0 && max_qs_[n] > 0.0) ++in_window;
  r.beta_hat = in_window >= 2 ? decay_fit(ts_, max_qs_, t0, state.t) : 0.0;

  r.qt_sign = previous ? qt_boundary_sign(state.q, previous->q, state.t - previous->t) : 0.0;
  return r;
}

}  // namespace stefan2d
