#include "stefan2d/elliptic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "stefan2d/derivatives.hpp"

namespace stefan2d {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

void axpy(double c, const std::vector<double>& x, std::vector<double>& y) {
  for (size_t k = 0; k < y.size(); ++k) y[k] += c * x[k];
}

}  // namespace

struct EllipticSolver::Precond {
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu;  // one factorization per mode

  // z -> M^{-1} z: angular transform, per-mode radial solve, transform back.
  void apply(const Grid& g, const std::vector<double>& z, std::vector<double>& out) const {
    const int nr = g.nr();
    const int nth = g.nth();
    const int nm = nth / 2 + 1;
    RingTransform& ring = g.ring();
    std::vector<std::complex<double>> modes(nm);
    std::vector<std::complex<double>> hat(static_cast<size_t>(nm) * nr);
    for (int i = 0; i < nr; ++i) {
      ring.to_modes(z.data() + static_cast<size_t>(i) * nth, modes.data());
      for (int m = 0; m < nm; ++m) hat[static_cast<size_t>(m) * nr + i] = modes[m];
    }
    Eigen::MatrixXd rhs(nr, 2);
    for (int m = 0; m < nm; ++m) {
      for (int i = 0; i < nr; ++i) {
        rhs(i, 0) = hat[static_cast<size_t>(m) * nr + i].real();
        rhs(i, 1) = hat[static_cast<size_t>(m) * nr + i].imag();
      }
      Eigen::MatrixXd sol = lu[m].solve(rhs);
      for (int i = 0; i < nr; ++i) {
        hat[static_cast<size_t>(m) * nr + i] = {sol(i, 0), sol(i, 1)};
      }
    }
    for (int i = 0; i < nr; ++i) {
      for (int m = 0; m < nm; ++m) modes[m] = hat[static_cast<size_t>(m) * nr + i];
      ring.to_ring(modes.data(), out.data() + static_cast<size_t>(i) * nth);
    }
  }
};

EllipticSolver::EllipticSolver(GridPtr grid, const EllipticCoefficients& co, Options opt)
    : grid_(std::move(grid)), opt_(opt) {
  const Grid& g = *grid_;
  if (co.a11.grid.get() != grid_.get()) {
    throw std::invalid_argument("EllipticSolver: coefficients live on a different grid");
  }
  const int n = g.size();
  c_ss_.resize(n);
  c_st_.resize(n);
  c_tt_.resize(n);
  c_s_.resize(n);
  c_t_.resize(n);
  c_0_.resize(n);
  const Grid::SecondFactors& fxx = g.fxx();
  const Grid::SecondFactors& fxy = g.fxy();
  const Grid::SecondFactors& fyy = g.fyy();
  for (int i = 0; i < g.nr(); ++i) {
    for (int j = 0; j < g.nth(); ++j) {
      const int id = g.index(i, j);
      const double axx = co.a11.v[id];
      const double axy = 2.0 * co.a12.v[id];
      const double ayy = co.a22.v[id];
      c_ss_[id] = axx * fxx.c_ss[id] + axy * fxy.c_ss[id] + ayy * fyy.c_ss[id];
      c_st_[id] = axx * fxx.c_st[id] + axy * fxy.c_st[id] + ayy * fyy.c_st[id];
      c_tt_[id] = axx * fxx.c_tt[id] + axy * fxy.c_tt[id] + ayy * fyy.c_tt[id];
      c_s_[id] = axx * fxx.c_s[id] + axy * fxy.c_s[id] + ayy * fyy.c_s[id] +
                 co.b1.v[id] * g.gxs(j) + co.b2.v[id] * g.gys(j);
      c_t_[id] = axx * fxx.c_t[id] + axy * fxy.c_t[id] + ayy * fyy.c_t[id] +
                 co.b1.v[id] * g.gxt(i, j) + co.b2.v[id] * g.gyt(i, j);
      c_0_[id] = co.c.v[id];
    }
  }

  // Per-mode preconditioner: the angular mean of the isotropic part of the
  // operator, discretized on the theta = 0 diameter. Samples that land on the
  // antipodal column pick up a (-1)^m parity factor in mode space.
  const int nr = g.nr();
  const int nth = g.nth();
  std::vector<double> abar(nr, 0.0), gbar(nr, 0.0);
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nth; ++j) {
      const int id = g.index(i, j);
      abar[i] += 0.5 * (co.a11.v[id] + co.a22.v[id]);
      gbar[i] += co.c.v[id];
    }
    abar[i] /= nth;
    gbar[i] /= nth;
  }
  const auto& idx = g.stencil_index();
  const auto& w1 = g.stencil_w1();
  const auto& w2 = g.stencil_w2();
  const double Rcol = g.R(0);
  pre_ = std::make_unique<Precond>();
  pre_->lu.reserve(nth / 2 + 1);
  for (int m = 0; m <= nth / 2; ++m) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(nr, nr);
    const double parity = (m % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i < nr - 1; ++i) {
      const double xi = g.s(i) * Rcol;
      const double s2 = g.s(i) * g.s(i);
      const size_t base = static_cast<size_t>(g.index(i, 0)) * Grid::kStencil;
      for (int k = 0; k < Grid::kStencil; ++k) {
        const int flat = idx[base + k];
        const int ic = flat / nth;
        const double sign = (flat % nth == 0) ? 1.0 : parity;
        P(i, ic) += s2 * abar[i] * (w2[base + k] + w1[base + k] / xi) * sign;
      }
      P(i, i) += s2 * (gbar[i] - abar[i] * static_cast<double>(m) * m / (xi * xi));
    }
    P(nr - 1, nr - 1) = 1.0;
    pre_->lu.emplace_back(P);
  }
}

EllipticSolver::~EllipticSolver() = default;

Field EllipticSolver::apply(const Field& u) const {
  if (u.grid.get() != grid_.get()) {
    throw std::invalid_argument("EllipticSolver::apply: field lives on a different grid");
  }
  const Field us = chart_ds(u);
  const Field uss = chart_dss(u);
  const Field ut = chart_dtheta(u, 1);
  const Field utt = chart_dtheta(u, 2);
  const Field ust = chart_dtheta(us, 1);
  Field out(grid_);
  for (int id = 0; id < grid_->size(); ++id) {
    out.v[id] = c_ss_[id] * uss.v[id] + c_st_[id] * ust.v[id] + c_tt_[id] * utt.v[id] +
                c_s_[id] * us.v[id] + c_t_[id] * ut.v[id] + c_0_[id] * u.v[id];
  }
  return out;
}

void EllipticSolver::apply_scaled(const std::vector<double>& u, std::vector<double>& out) const {
  const Grid& g = *grid_;
  Field tmp(grid_);
  tmp.v = u;
  Field Lu = apply(tmp);
  out.resize(g.size());
  for (int i = 0; i < g.nr() - 1; ++i) {
    const double s2 = g.s(i) * g.s(i);
    for (int j = 0; j < g.nth(); ++j) {
      const int id = g.index(i, j);
      out[id] = s2 * Lu.v[id];
    }
  }
  for (int j = 0; j < g.nth(); ++j) {
    const int id = g.index(g.nr() - 1, j);
    out[id] = u[id];
  }
}

EllipticSolution EllipticSolver::solve(const Field& f, const BoundaryField& gbc,
                                       const Field* warm_start) const {
  const Grid& g = *grid_;
  if (f.grid.get() != grid_.get() || gbc.grid.get() != grid_.get()) {
    throw std::invalid_argument("EllipticSolver::solve: data lives on a different grid");
  }
  const int n = g.size();
  const int nr = g.nr();
  const int nth = g.nth();

  EllipticSolution sol;
  sol.u = Field(grid_);

  const double scale = std::max(f.max_abs(), gbc.max_abs());
  if (scale == 0.0) {
    sol.converged = true;
    return sol;
  }
  const double tol = opt_.rtol * scale;

  std::vector<double> b(n);
  for (int i = 0; i < nr - 1; ++i) {
    const double s2 = g.s(i) * g.s(i);
    for (int j = 0; j < nth; ++j) b[g.index(i, j)] = s2 * f.v[g.index(i, j)];
  }
  for (int j = 0; j < nth; ++j) b[g.index(nr - 1, j)] = gbc[j];

  std::vector<double> x = warm_start ? warm_start->v : std::vector<double>(n, 0.0);
  std::vector<double> r(n), w(n);

  const int K = opt_.restart;
  std::vector<std::vector<double>> V(K + 1), Z(K);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(K + 1, K);
  std::vector<double> cs(K), sn(K), gv(K + 1);

  int iters = 0;
  double rinf = 0.0;
  for (;;) {
    apply_scaled(x, r);
    for (int id = 0; id < n; ++id) r[id] = b[id] - r[id];
    rinf = norm_inf(r);
    if (rinf <= tol || iters >= opt_.max_iterations) break;

    const double beta = norm2(r);
    V[0] = r;
    for (double& t : V[0]) t /= beta;
    std::fill(gv.begin(), gv.end(), 0.0);
    gv[0] = beta;

    int kused = 0;
    for (int k = 0; k < K && iters < opt_.max_iterations; ++k) {
      Z[k].resize(n);
      pre_->apply(g, V[k], Z[k]);
      apply_scaled(Z[k], w);
      const double wn0 = norm2(w);
      for (int l = 0; l <= k; ++l) {
        H(l, k) = dot(w, V[l]);
        axpy(-H(l, k), V[l], w);
      }
      double wn = norm2(w);
      if (wn < 0.7 * wn0) {  // re-orthogonalize on heavy cancellation
        for (int l = 0; l <= k; ++l) {
          const double t = dot(w, V[l]);
          H(l, k) += t;
          axpy(-t, V[l], w);
        }
        wn = norm2(w);
      }
      H(k + 1, k) = wn;

      for (int l = 0; l < k; ++l) {
        const double t = cs[l] * H(l, k) + sn[l] * H(l + 1, k);
        H(l + 1, k) = -sn[l] * H(l, k) + cs[l] * H(l + 1, k);
        H(l, k) = t;
      }
      const double denom = std::hypot(H(k, k), H(k + 1, k));
      cs[k] = H(k, k) / denom;
      sn[k] = H(k + 1, k) / denom;
      H(k, k) = denom;
      H(k + 1, k) = 0.0;
      gv[k + 1] = -sn[k] * gv[k];
      gv[k] = cs[k] * gv[k];

      ++iters;
      kused = k + 1;
      const double res2 = std::abs(gv[k + 1]);
      if (res2 <= tol || wn <= 1e-32) break;
      if (k + 1 < K) {
        V[k + 1] = w;
        for (double& t : V[k + 1]) t /= wn;
      }
    }

    // Back-substitute the rotated Hessenberg system and update x.
    std::vector<double> y(kused);
    for (int l = kused - 1; l >= 0; --l) {
      double acc = gv[l];
      for (int p = l + 1; p < kused; ++p) acc -= H(l, p) * y[p];
      y[l] = acc / H(l, l);
    }
    for (int l = 0; l < kused; ++l) axpy(y[l], Z[l], x);
  }

  sol.u.v = std::move(x);
  sol.residual = rinf;
  sol.iterations = iters;
  sol.converged = rinf <= tol;
  return sol;
}

EllipticSolution solve_poisson(const Field& f, const BoundaryField& g) {
  EllipticCoefficients co(f.grid);
  EllipticSolver solver(f.grid, co);
  return solver.solve(f, g);
}

}  // namespace stefan2d
