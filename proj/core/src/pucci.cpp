#include "stefan2d/pucci.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "stefan2d/derivatives.hpp"
#include "stefan2d/elliptic.hpp"

namespace stefan2d {

void PucciParams::validate() const {
  if (!(mu1 > 0.0) || !(mu1 <= mu2))
    throw std::invalid_argument("pucci: ellipticity bounds need 0 < mu1 <= mu2");
  if (!(gamma >= 0.0)) throw std::invalid_argument("pucci: drift bound gamma must be >= 0");
}

namespace {

// Eigenvalues of the symmetric matrix [hxx hxy; hxy hyy]: m -+ r.
inline void hess_eigs(double hxx, double hxy, double hyy, double& lo, double& hi) {
  double m = 0.5 * (hxx + hyy);
  double r = std::hypot(0.5 * (hxx - hyy), hxy);
  lo = m - r;
  hi = m + r;
}

}  // namespace

double pucci_minus_matrix(double hxx, double hxy, double hyy, const PucciParams& p) {
  double lo, hi;
  hess_eigs(hxx, hxy, hyy, lo, hi);
  auto w = [&](double e) { return e > 0.0 ? p.mu1 * e : p.mu2 * e; };
  return w(lo) + w(hi);
}

double pucci_plus_matrix(double hxx, double hxy, double hyy, const PucciParams& p) {
  double lo, hi;
  hess_eigs(hxx, hxy, hyy, lo, hi);
  auto w = [&](double e) { return e > 0.0 ? p.mu2 * e : p.mu1 * e; };
  return w(lo) + w(hi);
}

namespace {

Field pucci_field(const Field& u, const PucciParams& p, bool dual) {
  Hessian H = hessian(u);
  Gradient G = gradient(u);
  Field out(u.grid);
  for (std::size_t n = 0; n < out.v.size(); ++n) {
    double second = dual ? pucci_plus_matrix(H.xx.v[n], H.xy.v[n], H.yy.v[n], p)
                         : pucci_minus_matrix(H.xx.v[n], H.xy.v[n], H.yy.v[n], p);
    double drift = p.gamma * std::hypot(G.x.v[n], G.y.v[n]);
    out.v[n] = second + (dual ? drift : -drift);
  }
  return out;
}

// The extremal coefficients of the current iterate: diagonal mu_i in the
// local Hessian eigenframe, plus the aligned drift direction.
void extremal_policy(const Field& u, const PucciParams& p, bool dual, EllipticCoefficients& co) {
  Hessian H = hessian(u);
  Gradient G = gradient(u);
  for (std::size_t n = 0; n < u.v.size(); ++n) {
    double hxx = H.xx.v[n], hxy = H.xy.v[n], hyy = H.yy.v[n];
    double m = 0.5 * (hxx + hyy);
    double r = std::hypot(0.5 * (hxx - hyy), hxy);
    auto w = [&](double e) {
      bool low = e > 0.0;  // mu1 on positive directions for M-
      if (dual) low = !low;
      return low ? p.mu1 : p.mu2;
    };
    if (r < 1e-300) {
      double mu = w(m);
      co.a11.v[n] = mu;
      co.a22.v[n] = mu;
      co.a12.v[n] = 0.0;
    } else {
      double c2 = 0.5 * (hxx - hyy) / r;
      double s2 = hxy / r;
      double whi = w(m + r), wlo = w(m - r);
      double mean = 0.5 * (whi + wlo), half = 0.5 * (whi - wlo);
      co.a11.v[n] = mean + half * c2;
      co.a22.v[n] = mean - half * c2;
      co.a12.v[n] = half * s2;
    }
    double gn = std::hypot(G.x.v[n], G.y.v[n]);
    if (p.gamma > 0.0 && gn > 1e-300) {
      double sgn = dual ? 1.0 : -1.0;
      co.b1.v[n] = sgn * p.gamma * G.x.v[n] / gn;
      co.b2.v[n] = sgn * p.gamma * G.y.v[n] / gn;
    } else {
      co.b1.v[n] = 0.0;
      co.b2.v[n] = 0.0;
    }
  }
}

double interior_residual(const Field& u, const Field& f, const PucciParams& p, bool dual) {
  Field mu = pucci_field(u, p, dual);
  const Grid& g = *u.grid;
  double res = 0.0;
  for (int i = 0; i < g.nr() - 1; ++i)
    for (int j = 0; j < g.nth(); ++j)
      res = std::max(res, std::abs(mu(i, j) + f(i, j)));
  return res;
}

}  // namespace

PolicyResult policy_solve(const Field& f, const PucciParams& p, bool dual, const Field* warm) {
  p.validate();
  const GridPtr& g = f.grid;
  BoundaryField zero(g);

  Field u(g);
  if (warm) {
    u = *warm;
  } else {
    // Isotropic mid-class start.
    EllipticCoefficients iso(g);
    double mid = 0.5 * (p.mu1 + p.mu2);
    for (std::size_t n = 0; n < iso.a11.v.size(); ++n) {
      iso.a11.v[n] = mid;
      iso.a22.v[n] = mid;
    }
    EllipticSolver s0(g, iso);
    Field rhs = -1.0 * f;
    EllipticSolution sol = s0.solve(rhs, zero);
    if (!sol.converged) throw std::runtime_error("policy iteration: initial solve failed");
    u = sol.u;
  }

  PolicyResult out{Field(g), 0, 0.0, false};
  const int max_iter = 60;
  double prev_diff = std::numeric_limits<double>::infinity();
  int growth = 0;
  EllipticCoefficients co(g);
  Field rhs = -1.0 * f;
  for (int it = 0; it < max_iter; ++it) {
    extremal_policy(u, p, dual, co);
    EllipticSolver solver(g, co);
    EllipticSolution sol = solver.solve(rhs, zero, &u);
    if (!sol.converged) throw std::runtime_error("policy iteration: linear solve failed");
    Field next = sol.u;
    if (out.damped)
      for (std::size_t n = 0; n < next.v.size(); ++n) next.v[n] = 0.5 * (next.v[n] + u.v[n]);
    double diff = 0.0;
    for (std::size_t n = 0; n < next.v.size(); ++n)
      diff = std::max(diff, std::abs(next.v[n] - u.v[n]));
    u = std::move(next);
    out.iterations = it + 1;
    if (diff > prev_diff && ++growth >= 2) out.damped = true;  // oscillating policy
    prev_diff = diff;
    if (diff < 1e-9) break;
  }
  out.residual = interior_residual(u, f, p, dual);
  if (out.residual >= 1e-5)
    throw std::runtime_error("policy iteration: nonlinear residual did not reach 1e-5");
  out.u = std::move(u);
  return out;
}

namespace {

double bulk_median_ratio(const Field& rho, const PucciParams& p, bool dual) {
  Field mrho = pucci_field(rho, p, dual);
  const Grid& g = *rho.grid;
  double mx = 0.0;
  for (double x : rho.v) mx = std::max(mx, x);
  std::vector<double> ratios;
  ratios.reserve(rho.v.size());
  for (int i = 0; i < g.nr() - 1; ++i)
    for (int j = 0; j < g.nth(); ++j)
      if (rho(i, j) > 0.1 * mx) ratios.push_back(-mrho(i, j) / rho(i, j));
  if (ratios.empty()) throw std::runtime_error("half eigenpair: empty bulk");
  std::size_t mid = ratios.size() / 2;
  std::nth_element(ratios.begin(), ratios.begin() + mid, ratios.end());
  return ratios[mid];
}

HalfEigenpair half_eigenpair_branch(const PucciParams& p, const GridPtr& g, bool dual) {
  p.validate();
  Field rho(g);
  for (int i = 0; i < g->nr(); ++i)
    for (int j = 0; j < g->nth(); ++j) {
      double s = g->s(i);
      rho(i, j) = 1.0 - s * s;
    }
  double lambda = bulk_median_ratio(rho, p, dual);

  HalfEigenpair out;
  const int max_iter = 200;
  for (int it = 0; it < max_iter; ++it) {
    Field f = lambda * rho;
    PolicyResult ps = policy_solve(f, p, dual, &rho);
    out.damped = out.damped || ps.damped;
    double mx = 0.0;
    for (double x : ps.u.v) mx = std::max(mx, x);
    if (!(mx > 0.0)) throw std::runtime_error("half eigenpair: iterate lost positivity");
    rho = (1.0 / mx) * ps.u;
    double lambda_new = bulk_median_ratio(rho, p, dual);
    bool settled = std::abs(lambda_new - lambda) <= 1e-8 * std::abs(lambda_new);
    lambda = lambda_new;
    out.iterations = it + 1;
    if (settled) {
      Field mrho = pucci_field(rho, p, dual);
      double res = 0.0;
      for (int i = 0; i < g->nr() - 1; ++i)
        for (int j = 0; j < g->nth(); ++j)
          res = std::max(res, std::abs(mrho(i, j) + lambda * rho(i, j)));
      out.residual = res;
      if (res < 5e-6) break;
    }
  }
  if (out.iterations >= max_iter)
    throw std::runtime_error("half eigenpair: no convergence after max iterations");
  out.lambda = lambda;
  out.rho = std::move(rho);
  return out;
}

}  // namespace

HalfEigenpair half_eigenpair(const PucciParams& p, const GridPtr& g) {
  return half_eigenpair_branch(p, g, false);
}

NegativeHalfEigenpair negative_half_eigenpair(const PucciParams& p, const GridPtr& g) {
  HalfEigenpair dual = half_eigenpair_branch(p, g, true);
  NegativeHalfEigenpair out;
  out.lambda = dual.lambda;
  out.rho = -1.0 * dual.rho;
  out.iterations = dual.iterations;
  out.residual = dual.residual;
  return out;
}

double subsolution_residual(double lambda1, const Field& rho1, const HeatCoefficients& coeffs,
                            const PucciParams& p) {
  p.validate();
  const Grid& g = *rho1.grid;
  const double tol = 1e-9;
  for (int i = 0; i < g.nr(); ++i)
    for (int j = 0; j < g.nth(); ++j) {
      double lo, hi;
      hess_eigs(coeffs.a11(i, j), coeffs.a12(i, j), coeffs.a22(i, j), lo, hi);
      double bn = std::hypot(coeffs.b1(i, j), coeffs.b2(i, j));
      if (lo < p.mu1 - tol || hi > p.mu2 + tol || bn > p.gamma + tol) {
        std::ostringstream msg;
        msg << "subsolution_residual: coefficients leave the class at node (" << i << "," << j
            << "): eigenvalues [" << lo << "," << hi << "] vs [" << p.mu1 << "," << p.mu2
            << "], |b| = " << bn << " vs gamma = " << p.gamma;
        throw std::domain_error(msg.str());
      }
    }

  Hessian H = hessian(rho1);
  Gradient G = gradient(rho1);
  double res = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.nr() - 1; ++i)
    for (int j = 0; j < g.nth(); ++j) {
      double lrho = coeffs.a11(i, j) * H.xx(i, j) + 2.0 * coeffs.a12(i, j) * H.xy(i, j) +
                    coeffs.a22(i, j) * H.yy(i, j) + coeffs.b1(i, j) * G.x(i, j) +
                    coeffs.b2(i, j) * G.y(i, j);
      res = std::max(res, -lambda1 * rho1(i, j) - lrho);
    }
  return res;
}

ChiBoundAudit chi_bound_audit(const std::vector<double>& t, const std::vector<double>& chi_series,
                              double lambda1, double c1, double eta, double floor) {
  if (t.size() != chi_series.size())
    throw std::invalid_argument("chi_bound_audit: length mismatch");
  if (t.empty()) throw std::invalid_argument("chi_bound_audit: empty series");
  ChiBoundAudit out;
  out.floor = floor;
  out.c = std::numeric_limits<double>::infinity();
  double rate = lambda1 + 0.25 * eta;
  for (std::size_t n = 0; n < t.size(); ++n) {
    double bound = c1 * std::exp(-rate * t[n]);
    double ratio = chi_series[n] / bound;
    if (ratio < out.c) {
      out.c = ratio;
      out.t_min = t[n];
    }
  }
  out.pass = out.c >= floor;
  return out;
}

}  // namespace stefan2d
