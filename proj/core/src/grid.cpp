#include "stefan2d/grid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stefan2d {

void fd_weights(double x0, std::span<const double> nodes, int maxorder,
                std::vector<std::vector<double>>& w) {
  const int n = static_cast<int>(nodes.size()) - 1;
  w.assign(n + 1, std::vector<double>(maxorder + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  w[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, maxorder);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          w[i][k] = c1 * (k * w[i - 1][k - 1] - c5 * w[i - 1][k]) / c2;
        }
        w[i][0] = -c1 * c5 * w[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        w[j][k] = (c4 * w[j][k] - k * w[j][k - 1]) / c3;
      }
      w[j][0] = c4 * w[j][0] / c3;
    }
    c1 = c2;
  }
}

Grid::Grid(const StarDomain& domain, int nr, int nth) : nr_(nr), nth_(nth) {
  if (nr < 8) throw DomainError("grid: nr must be at least 8");
  if (nth < 8 || nth % 2 != 0) throw DomainError("grid: nth must be even and at least 8");

  ds_ = 2.0 / (2.0 * nr - 1.0);
  dth_ = 2.0 * std::numbers::pi / nth;

  s_.resize(nr);
  for (int i = 0; i < nr; ++i) s_[i] = (i + 0.5) * ds_;
  th_.resize(nth);
  cth_.resize(nth);
  sth_.resize(nth);
  R_.resize(nth);
  Rp_.resize(nth);
  Rpp_.resize(nth);
  ell_.resize(nth);
  nx_.resize(nth);
  ny_.resize(nth);
  kappa_.resize(nth);

  for (int j = 0; j < nth; ++j) {
    const double t = j * dth_;
    th_[j] = t;
    cth_[j] = std::cos(t);
    sth_[j] = std::sin(t);
    R_[j] = domain.R(t);
    Rp_[j] = domain.Rp(t);
    Rpp_[j] = domain.Rpp(t);
    if (!(R_[j] > 0.0)) throw DomainError("grid: radius function must be positive (not star-shaped)");
  }

  is_disk_ = true;
  for (int j = 0; j < nth; ++j) {
    if (std::abs(R_[j] - R_[0]) > 1e-14 || std::abs(Rp_[j]) > 1e-14 || std::abs(Rpp_[j]) > 1e-14) {
      is_disk_ = false;
      break;
    }
  }

  for (int j = 0; j < nth; ++j) {
    const double R = R_[j], Rp = Rp_[j], Rpp = Rpp_[j];
    const double ell = std::sqrt(R * R + Rp * Rp);
    ell_[j] = ell;
    // Outward normal (R e_r - R' e_theta) / |.|
    nx_[j] = (R * cth_[j] + Rp * sth_[j]) / ell;
    ny_[j] = (R * sth_[j] - Rp * cth_[j]) / ell;
    kappa_[j] = (R * R + 2.0 * Rp * Rp - R * Rpp) / (ell * ell * ell);
  }

  build_stencils();
  build_factors();
  build_quadrature();
  build_mu(domain);

  ring_ = std::make_unique<RingTransform>(nth);
}

void Grid::build_stencils() {
  const int W = kStencil;
  const int ndiam = 2 * nr_;
  didx_.assign(static_cast<size_t>(size()) * W, 0);
  dw1_.assign(static_cast<size_t>(size()) * W, 0.0);
  dw2_.assign(static_cast<size_t>(size()) * W, 0.0);

  std::vector<double> xi(ndiam);
  std::vector<int> flat(ndiam);
  std::vector<double> window(W);
  std::vector<std::vector<double>> w;

  for (int j = 0; j < nth_; ++j) {
    const int jm = (j + nth_ / 2) % nth_;
    for (int l = 0; l < ndiam; ++l) {
      if (l < nr_) {
        const int mi = nr_ - 1 - l;
        xi[l] = -s_[mi] * R_[jm];
        flat[l] = mi * nth_ + jm;
      } else {
        const int io = l - nr_;
        xi[l] = s_[io] * R_[j];
        flat[l] = io * nth_ + j;
      }
    }
    for (int i = 0; i < nr_; ++i) {
      const int lt = nr_ + i;
      const int start = std::clamp(lt - W / 2, 0, ndiam - W);
      for (int k = 0; k < W; ++k) window[k] = xi[start + k];
      fd_weights(xi[lt], window, 2, w);
      const size_t base = (static_cast<size_t>(i) * nth_ + j) * W;
      for (int k = 0; k < W; ++k) {
        didx_[base + k] = flat[start + k];
        dw1_[base + k] = w[k][1];
        dw2_[base + k] = w[k][2];
      }
    }
  }
}

void Grid::build_factors() {
  gxs_.resize(nth_);
  gys_.resize(nth_);
  gxt_.resize(size());
  gyt_.resize(size());

  std::vector<double> dgxs(nth_), dgys(nth_);  // d/dtheta of the s-factors
  for (int j = 0; j < nth_; ++j) {
    const double R = R_[j], Rp = Rp_[j], Rpp = Rpp_[j];
    const double c = cth_[j], sn = sth_[j];
    const double R2 = R * R;
    gxs_[j] = (Rp * sn + R * c) / R2;
    gys_[j] = (R * sn - Rp * c) / R2;
    dgxs[j] = (Rpp * sn + 2.0 * Rp * c - R * sn) / R2 -
              2.0 * Rp * (Rp * sn + R * c) / (R2 * R);
    dgys[j] = (2.0 * Rp * sn + R * c - Rpp * c) / R2 -
              2.0 * Rp * (R * sn - Rp * c) / (R2 * R);
  }
  for (int i = 0; i < nr_; ++i) {
    for (int j = 0; j < nth_; ++j) {
      const double sr = s_[i] * R_[j];
      gxt_[index(i, j)] = -sth_[j] / sr;
      gyt_[index(i, j)] = cth_[j] / sr;
    }
  }

  auto fill = [&](SecondFactors& f, bool a_is_x, bool b_is_x) {
    f.c_ss.resize(size());
    f.c_st.resize(size());
    f.c_tt.resize(size());
    f.c_s.resize(size());
    f.c_t.resize(size());
    for (int i = 0; i < nr_; ++i) {
      for (int j = 0; j < nth_; ++j) {
        const int id = index(i, j);
        const double R = R_[j], Rp = Rp_[j];
        const double c = cth_[j], sn = sth_[j];
        const double s = s_[i], sR = s * R;
        const double gas = a_is_x ? gxs_[j] : gys_[j];
        const double gat = a_is_x ? gxt_[id] : gyt_[id];
        const double gbs = b_is_x ? gxs_[j] : gys_[j];
        const double gbt = b_is_x ? gxt_[id] : gyt_[id];
        const double dth_gbs = b_is_x ? dgxs[j] : dgys[j];
        const double ds_gbt = b_is_x ? sn / (s * sR) : -c / (s * sR);
        const double dth_gbt = b_is_x ? (-c * R + sn * Rp) / (sR * R)
                                      : (-sn * R - c * Rp) / (sR * R);
        f.c_ss[id] = gas * gbs;
        f.c_st[id] = gas * gbt + gat * gbs;
        f.c_tt[id] = gat * gbt;
        f.c_s[id] = gat * dth_gbs;
        f.c_t[id] = gas * ds_gbt + gat * dth_gbt;
      }
    }
  };
  fill(fxx_, true, true);
  fill(fxy_, true, false);
  fill(fyy_, false, false);
}

void Grid::build_quadrature() {
  // Midpoint-type base weights on [0, 1] (the last cell is a half cell), then
  // a least-squares moment correction so polynomials of degree <= 8 integrate
  // exactly. Legendre rows keep the correction system well conditioned.
  const int P = std::min(8, nr_ - 1);
  Eigen::VectorXd w0(nr_);
  for (int i = 0; i < nr_; ++i) w0[i] = ds_;
  w0[nr_ - 1] = 0.5 * ds_;

  Eigen::MatrixXd V(P + 1, nr_);
  for (int i = 0; i < nr_; ++i) {
    const double x = 2.0 * s_[i] - 1.0;
    double pm1 = 1.0, p = x;
    V(0, i) = 1.0;
    if (P >= 1) V(1, i) = x;
    for (int k = 2; k <= P; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p - (k - 1.0) * pm1) / k;
      V(k, i) = pk;
      pm1 = p;
      p = pk;
    }
  }
  Eigen::VectorXd m = Eigen::VectorXd::Zero(P + 1);
  m[0] = 1.0;  // int_0^1 P_0(2s-1) ds; higher Legendre moments vanish

  const Eigen::MatrixXd G = V * V.transpose();
  const Eigen::VectorXd lam = G.ldlt().solve(m - V * w0);
  const Eigen::VectorXd w = w0 + V.transpose() * lam;

  wrad_.assign(w.data(), w.data() + nr_);
}

void Grid::build_mu(const StarDomain& domain) {
  mu_.resize(size());
  for (int j = 0; j < nth_; ++j) {
    const double s_lo = domain.rho / R_[j];
    const double s_hi = 1.0 - domain.sigma * ell_[j] / (R_[j] * R_[j]);
    if (!(s_hi > s_lo)) {
      throw DomainError("grid: cutoff plateaus overlap (rho + sigma leave no room)");
    }
    for (int i = 0; i < nr_; ++i) {
      const double s = s_[i];
      double v;
      if (s <= s_lo) {
        v = 0.0;
      } else if (s >= s_hi) {
        v = 1.0;
      } else {
        const double xi = (s - s_lo) / (s_hi - s_lo);
        v = xi * xi * xi * (10.0 + xi * (-15.0 + 6.0 * xi));
      }
      mu_[index(i, j)] = v;
    }
  }
}

double Grid::integrate(std::span<const double> nodal) const {
  double total = 0.0;
  for (int i = 0; i < nr_; ++i) {
    const double wi = wrad_[i] * s_[i];
    double ring = 0.0;
    for (int j = 0; j < nth_; ++j) {
      ring += nodal[index(i, j)] * R_[j] * R_[j];
    }
    total += wi * ring;
  }
  return total * dth_;
}

double Grid::integrate_boundary(std::span<const double> boundary) const {
  double total = 0.0;
  for (int j = 0; j < nth_; ++j) total += boundary[j] * ell_[j];
  return total * dth_;
}

GridPtr build_grid(const StarDomain& domain, int nr, int nth) {
  return std::make_shared<Grid>(domain, nr, nth);
}

}  // namespace stefan2d
