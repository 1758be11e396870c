#include "stefan2d/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>

#include "stefan2d/eigenpair.hpp"
#include "stefan2d/pucci.hpp"

namespace stefan2d {

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

// =====================  Bessel-root oracle  =====================
// J_0 by its power series (entire; eight terms already suffice on [0, 3])
// and its first zero by bisection.  Keeps the eigenvalue target independent
// of the solver under test.

double bessel_j0(double x) {
  double term = 1.0, sum = 1.0;
  double q = 0.25 * x * x;
  for (int m = 1; m <= 24; ++m) {
    term *= -q / (static_cast<double>(m) * m);
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

double bessel_j0_root() {
  double lo = 2.0, hi = 3.0;  // J_0(2) > 0 > J_0(3)
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (bessel_j0(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

double rel_l2_error(const Field& u, const Field& target) {
  std::vector<double> num(u.v.size()), den(u.v.size());
  for (std::size_t n = 0; n < u.v.size(); ++n) {
    double d = u.v[n] - target.v[n];
    num[n] = d * d;
    den[n] = target.v[n] * target.v[n];
  }
  const Grid& g = *u.grid;
  return std::sqrt(g.integrate(num) / g.integrate(den));
}

// Smooth random field: low angular modes carried by pole-compatible radial
// monomials s^{m+2p}, normalized to a given amplitude.
Field random_smooth(const GridPtr& g, std::mt19937& rng, double amp) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double c[4][3], s[4][3];
  for (int m = 0; m < 4; ++m)
    for (int p = 0; p < 3; ++p) {
      c[m][p] = U(rng);
      s[m][p] = U(rng);
    }
  Field f(g);
  for (int i = 0; i < g->nr(); ++i)
    for (int j = 0; j < g->nth(); ++j) {
      double si = g->s(i), th = g->theta(j);
      double val = 0.0;
      for (int m = 0; m < 4; ++m) {
        double ang_c = std::cos(m * th), ang_s = std::sin(m * th);
        double rad = std::pow(si, m);
        for (int p = 0; p < 3; ++p) {
          val += rad * (c[m][p] * ang_c + s[m][p] * ang_s);
          rad *= si * si;
        }
      }
      f(i, j) = val;
    }
  double mx = f.max_abs();
  if (mx > 0.0)
    for (double& v : f.v) v *= amp / mx;
  return f;
}

struct SnapshotCapture {
  double t = 0.0;
  HeatCoefficients coeffs;
  bool have = false;
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const SimConfig& cfg) {
  std::vector<CriterionResult> out;
  auto add = [&](const char* name, bool pass, double margin, std::string detail) {
    out.push_back({name, pass, margin, std::move(detail)});
  };
  auto guarded = [&](const char* name, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      add(name, false, 0.0, std::string("exception: ") + e.what());
    }
  };

  // ---- shared trajectory -------------------------------------------------
  // One coupled run carries every run-based criterion.  The horizon is
  // extended one unit past T_K (A6 settling and A9 late-time sign live
  // there); the stepping is diagnostics-free, so rows at t <= t_end match a
  // plain run of cfg bitwise.
  SimConfig probe_cfg = cfg;
  probe_cfg.t_end = 0.0;
  double T_K_pre;
  {
    StefanSim probe(probe_cfg);
    T_K_pre = cfg.cbar * std::log(K_ratio(probe.initial_state().q));
  }
  SimConfig ext = cfg;
  ext.t_end = std::max(cfg.t_end, std::ceil(T_K_pre) + 1.0);

  StefanSim sim(ext);
  const double dt = ext.dt;
  const double t_def = cfg.t_end;
  const long n_def = std::lround(t_def / dt);
  const long n_mid = std::lround(0.5 * ext.t_end / dt);
  long n_snap[3];
  for (int k = 0; k < 3; ++k) n_snap[k] = std::lround(0.25 * (k + 1) * t_def / dt);

  double min_q_def = std::numeric_limits<double>::infinity();
  double min_q_ext = min_q_def;
  std::optional<BoundaryField> h_mid;
  SnapshotCapture snaps[3];
  auto observer = [&](const StefanState& st, int n) {
    double mn = st.q.min();
    min_q_ext = std::min(min_q_ext, mn);
    if (n <= n_def) min_q_def = std::min(min_q_def, mn);
    if (n == n_mid) h_mid = st.h;
    for (int k = 0; k < 3; ++k)
      if (n == n_snap[k] && n > 0) {
        snaps[k].t = st.t;
        snaps[k].coeffs = st.coeffs;
        snaps[k].have = true;
      }
  };
  RunResult run = sim.run(observer);
  const GridPtr& g = run.final_state.q.grid;
  const double lam = run.lambda;
  const bool full = run.termination == "t_end_reached";

  // Default-run slice (row indices are steps, rows[k] holds t = (k+1) dt).
  std::vector<double> ts{run.row0.t}, chis{run.row0.chi}, ql2{run.row0.q_l2},
      qh4sq{run.row0.q_h4 * run.row0.q_h4};
  for (const DiagnosticsRow& r : run.rows) {
    if (r.t > t_def + 0.5 * dt) break;
    ts.push_back(r.t);
    chis.push_back(r.chi);
    ql2.push_back(r.q_l2);
    qh4sq.push_back(r.q_h4 * r.q_h4);
  }
  const std::size_t rows_def = ts.size() - 1;  // recorded steps inside the default window

  // ---- A1: fixed-gauge heat ------------------------------------------------
  guarded("A1 fixed-gauge heat", [&] {
    const double dt1 = 1e-4, t1 = 0.1;
    Field one(g, 1.0), zero(g, 0.0);
    HeatCoefficients ident{one, zero, one, zero, zero};
    HeatOperator heat(g, ident, dt1, cfg.rtol);
    Field q = run.eigen.phi;
    long steps = std::lround(t1 / dt1);
    for (long n = 0; n < steps; ++n) q = heat.step(q, &q);
    Field target = run.eigen.phi;
    double decay = std::exp(-lam * t1);
    for (double& v : target.v) v *= decay;
    double err = rel_l2_error(q, target);
    add("A1 fixed-gauge heat", err < 1e-3, 1e-3 - err,
        fmt("rel L2 error %.3e vs tolerance 1e-3 after %ld steps of dt=1e-4", err, steps));
  });

  // ---- A2: Dirichlet eigenvalue ---------------------------------------------
  guarded("A2 dirichlet eigenvalue", [&] {
    double j01 = bessel_j0_root();
    double target = j01 * j01;
    // Tolerances are pinned at 64^2 and 128^2; other resolutions scale by a
    // conservative fourth-order convergence model (the stencils converge
    // faster, so scaled runs keep slack).
    double scale1 = std::pow(64.0 / cfg.nr, 4);
    double err1 = std::abs(lam - target);
    double tol1 = 1e-4 * scale1;

    GridPtr g2 = build_grid(StarDomain::disk(1.0, cfg.rho, cfg.sigma), 2 * cfg.nr, 2 * cfg.nth);
    EigenPair e2 = dirichlet_eigenpair(g2);
    double err2 = std::abs(e2.lambda - target);
    double tol2 = 1e-6 * std::pow(128.0 / (2.0 * cfg.nr), 4);
    bool pass = err1 < tol1 && err2 < tol2;
    add("A2 dirichlet eigenvalue", pass, std::min(tol1 - err1, tol2 - err2),
        fmt("j01^2=%.10f; |err|=%.3e (tol %.1e) at %dx%d, %.3e (tol %.1e) at %dx%d", target, err1,
            tol1, cfg.nr, cfg.nth, err2, tol2, 2 * cfg.nr, 2 * cfg.nth));
  });

  // ---- A3: conservation ------------------------------------------------------
  guarded("A3 conservation", [&] {
    Field q0 = make_initial_data(cfg, g);
    double expected = std::numbers::pi + g->integrate(q0.v);
    double worst = std::abs(run.row0.conserved - expected);
    for (const DiagnosticsRow& r : run.rows) {
      if (r.t > t_def + 0.5 * dt) break;
      worst = std::max(worst, std::abs(r.conserved - expected));
    }
    double drift = worst / expected;
    double area_err = 0.0;
    bool have_final = full && rows_def > 0 && rows_def == static_cast<std::size_t>(n_def);
    if (have_final) area_err = std::abs(run.rows[rows_def - 1].area - expected) / expected;
    bool pass = have_final && drift < 1e-3 && area_err < 1e-3;
    add("A3 conservation", pass, std::min(1e-3 - drift, 1e-3 - area_err),
        fmt("expected mass %.8f; max rel drift %.3e, final-area rel error %.3e (tol 1e-3)%s",
            expected, drift, area_err,
            have_final ? "" : "; run ended early, final step missing"));
  });

  // ---- A4: temperature decay ---------------------------------------------------
  guarded("A4 temperature decay", [&] {
    double lo = 0.5 * t_def, hi = t_def;
    double fit_l2 = decay_fit(ts, ql2, lo, hi);
    double fit_h4 = decay_fit(ts, qh4sq, lo, hi);
    double rel1 = std::abs(fit_l2 - (-lam)) / lam;
    double rel2 = std::abs(fit_h4 - (-2.0 * lam)) / (2.0 * lam);
    bool pass = rel1 < 0.10 && rel2 < 0.15;
    add("A4 temperature decay", pass, std::min(0.10 - rel1, 0.15 - rel2),
        fmt("L2 rate %.4f vs -lambda=%.4f (off %.1f%%, tol 10%%); H4^2 rate %.4f vs %.4f "
            "(off %.1f%%, tol 15%%) on [%.1f, %.1f]",
            fit_l2, -lam, 100 * rel1, fit_h4, -2 * lam, 100 * rel2, lo, hi));
  });

  // ---- A5: chi lower bound -------------------------------------------------------
  guarded("A5 chi lower bound", [&] {
    // Class wide enough to contain every pulled-back coefficient of the run.
    double w = run.max_a_dev;
    PucciParams cls{1.0 - w, 1.0 + w, run.max_b_norm};
    cls.validate();
    HalfEigenpair ep = half_eigenpair(cls, g);
    ChiBoundAudit audit = chi_bound_audit(ts, chis, ep.lambda, run.c1, run.eta, 0.1);
    double chi_min = *std::min_element(chis.begin(), chis.end());
    bool pass = audit.pass && chi_min > 0.0;
    add("A5 chi lower bound", pass, std::min(audit.c - audit.floor, chi_min),
        fmt("c=%.4f >= floor %.2f (worst at t=%.3f); lambda1=%.6f on class [%.4f, %.4f], "
            "gamma=%.4f; min chi %.3e > 0",
            audit.c, audit.floor, audit.t_min, ep.lambda, cls.mu1, cls.mu2, cls.gamma, chi_min));
  });

  // ---- A6: boundary settling --------------------------------------------------------
  guarded("A6 boundary settling", [&] {
    double bound = 5.0 * std::sqrt(run.row0.S_proxy);
    double max_h = 0.0;
    for (const DiagnosticsRow& r : run.rows) max_h = std::max(max_h, r.h_l2);
    if (!h_mid || !full) {
      add("A6 boundary settling", false, 0.0,
          fmt("horizon %.1f not reached (termination: %s)", ext.t_end, run.termination.c_str()));
      return;
    }
    BoundaryField diff = run.final_state.h;
    for (int j = 0; j < g->nth(); ++j) diff[j] -= (*h_mid)[j];
    double settle = l2_norm_boundary(diff);
    double h_end = l2_norm_boundary(run.final_state.h);
    double allowance = 1e-3 * h_end + 1e-6;
    bool pass = max_h <= bound && settle < allowance;
    add("A6 boundary settling", pass, std::min(bound - max_h, allowance - settle),
        fmt("max |h| %.4e <= 5 sqrt(S(0)) = %.4e; |h(%.1f)-h(%.1f)| = %.3e < %.3e "
            "(1e-3 |h(%.1f)| + 1e-6)",
            max_h, bound, ext.t_end, 0.5 * ext.t_end, settle, allowance, ext.t_end));
  });

  // ---- A7: maximum principles ----------------------------------------------------------
  guarded("A7 maximum principles", [&] {
    double worst_rise = -std::numeric_limits<double>::infinity();
    double prev = run.row0.max_q;
    for (const DiagnosticsRow& r : run.rows) {
      if (r.t > t_def + 0.5 * dt) break;
      worst_rise = std::max(worst_rise, r.max_q - prev);
      prev = r.max_q;
    }

    // Random sign-constrained solves: smooth uniformly elliptic coefficients,
    // nonnegative data, one implicit step; the solution must stay inside
    // [0, max data] to roundoff.
    std::mt19937 rng(987654321u);
    GridPtr gp = build_grid(StarDomain::disk(1.0, cfg.rho, cfg.sigma), 32, 32);
    std::uniform_real_distribution<double> Udt(std::log(1e-4), std::log(3e-3));
    double worst_under = 0.0, worst_over = 0.0;
    const int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
      Field w1 = random_smooth(gp, rng, 0.15), w2 = random_smooth(gp, rng, 0.15);
      Field w3 = random_smooth(gp, rng, 0.12);
      Field b1 = random_smooth(gp, rng, 0.2), b2 = random_smooth(gp, rng, 0.2);
      Field a11 = w1, a22 = w2;
      for (double& v : a11.v) v += 1.0;
      for (double& v : a22.v) v += 1.0;
      HeatCoefficients hc{a11, w3, a22, b1, b2};
      Field q = random_smooth(gp, rng, 1.0);
      for (double& v : q.v) v = v * v;  // sign-constrained data, max 1
      double dtr = std::exp(Udt(rng));
      HeatOperator heat(gp, hc, dtr, 1e-10);
      Field u = heat.step(q);
      worst_under = std::max(worst_under, -u.min());
      worst_over = std::max(worst_over, u.max() - q.max());
    }
    double slack = std::min({min_q_def + 1e-9, 1e-9 - worst_rise, 1e-9 - worst_under,
                             1e-9 - worst_over});
    bool pass = min_q_def >= -1e-9 && worst_rise <= 1e-9 && worst_under <= 1e-9 &&
                worst_over <= 1e-9;
    add("A7 maximum principles", pass, slack,
        fmt("min q %.2e >= -1e-9; worst per-step rise of max q %.2e <= 1e-9; %d random "
            "solves: undershoot %.2e, overshoot %.2e (tol 1e-9)",
            min_q_def, worst_rise, trials, worst_under, worst_over));
  });

  // ---- A8: pucci suite ---------------------------------------------------------------------
  guarded("A8 pucci suite", [&] {
    HalfEigenpair p11 = half_eigenpair({1.0, 1.0, 0.0}, g);
    double err_lam = std::abs(p11.lambda - lam);

    HalfEigenpair p22 = half_eigenpair({2.0, 2.0, 0.0}, g);
    double rel_hom = std::abs(p22.lambda - 2.0 * p11.lambda) / (2.0 * p11.lambda);

    // Widening the class raises the principal half-eigenvalue: five nested
    // intervals must come out ordered.
    double widths[5] = {0.0, 0.05, 0.10, 0.15, 0.20};
    double nested[5];
    for (int k = 0; k < 5; ++k)
      nested[k] = half_eigenpair({1.0 - widths[k], 1.0 + widths[k], 0.0}, g).lambda;
    double worst_gap = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 5; ++k) worst_gap = std::min(worst_gap, nested[k] - nested[k - 1]);

    double lam12 = half_eigenpair({1.0, 1.2, 0.0}, g).lambda;
    double lower_slack = lam12 - (1.2 * lam - 1e-4);

    std::mt19937 rng(24601u);
    std::uniform_real_distribution<double> H(-5.0, 5.0), Mu1(0.4, 1.0), Mu2(1.0, 2.5);
    int dual_bad = 0;
    double super_worst = 0.0;
    for (int n = 0; n < 1000; ++n) {
      PucciParams pp{Mu1(rng), Mu2(rng), 0.0};
      double axx = H(rng), axy = H(rng), ayy = H(rng);
      double bxx = H(rng), bxy = H(rng), byy = H(rng);
      if (pucci_plus_matrix(axx, axy, ayy, pp) !=
          -pucci_minus_matrix(-axx, -axy, -ayy, pp))
        ++dual_bad;
      double lhs = pucci_minus_matrix(axx + bxx, axy + bxy, ayy + byy, pp);
      double rhs = pucci_minus_matrix(axx, axy, ayy, pp) + pucci_minus_matrix(bxx, bxy, byy, pp);
      double sc = std::max({1.0, std::abs(lhs), std::abs(rhs)});
      super_worst = std::max(super_worst, (rhs - lhs) / sc);
    }

    bool pass = err_lam < 1e-4 && rel_hom < 1e-6 && worst_gap > -1e-6 && lower_slack > 0.0 &&
                dual_bad == 0 && super_worst <= 1e-12;
    double margin = std::min({1e-4 - err_lam, 1e-6 - rel_hom, worst_gap + 1e-6, lower_slack,
                              1e-12 - super_worst});
    add("A8 pucci suite", pass, margin,
        fmt("|lambda1(1,1)-lambda|=%.1e (tol 1e-4); homogeneity rel %.1e (tol 1e-6); nested "
            "min gap %.3f; lambda1(1,1.2)=%.6f >= 1.2 lambda - 1e-4 by %.4f; duality exact "
            "%d/1000 off, superadditivity slack %.1e",
            err_lam, rel_hom, worst_gap, lam12, lower_slack, dual_bad, super_worst));
  });

  // ---- A9: late-time sign ---------------------------------------------------------------------
  guarded("A9 sign definiteness", [&] {
    double qt_min = std::numeric_limits<double>::infinity();
    long counted = 0;
    for (const DiagnosticsRow& r : run.rows)
      if (r.t >= run.T_K - 0.5 * dt) {
        qt_min = std::min(qt_min, r.qt_sign);
        ++counted;
      }
    if (counted == 0) qt_min = -1.0;

    // Frozen-coefficient class sized by the run's worst deviation from the
    // identity; the mid-run snapshots must sit inside it.
    double w = run.max_a_dev;
    PucciParams cls{1.0 - w, 1.0 + w, w};
    cls.validate();
    HalfEigenpair ep = half_eigenpair(cls, g);
    double worst_res = -std::numeric_limits<double>::infinity();
    int have = 0;
    std::string res_note;
    for (int k = 0; k < 3; ++k) {
      if (!snaps[k].have) continue;
      ++have;
      double res = subsolution_residual(ep.lambda, ep.rho, snaps[k].coeffs, cls);
      worst_res = std::max(worst_res, res);
      res_note += fmt("%s%.1e@t=%.2f", res_note.empty() ? "" : ", ", res, snaps[k].t);
    }
    if (have == 0) worst_res = 1.0;
    bool pass = full && counted > 0 && qt_min > 0.0 && have == 3 && worst_res <= 1e-4;
    add("A9 sign definiteness", pass, std::min(qt_min, 1e-4 - worst_res),
        fmt("qt sign min %.3e > 0 over %ld steps past T_K=%.4f (horizon %.1f); subsolution "
            "residuals [%s] <= 1e-4 on class width %.4f",
            qt_min, counted, run.T_K, ext.t_end, res_note.c_str(), w));
  });

  return out;
}

}  // namespace stefan2d
