#pragma once

#include <memory>
#include <span>
#include <vector>

#include "stefan2d/domain.hpp"
#include "stefan2d/fourier.hpp"

namespace stefan2d {

/// Polar-type tensor grid on a star-shaped domain.
///
/// Radial layout is staggered: s_i = (i + 1/2) * ds with ds = 2/(2 nr - 1),
/// so there is no node at the pole and the last ring lies exactly on Gamma.
/// The angular grid theta_j = 2 pi j / nth is uniform (nth even); boundary
/// nodes coincide with the theta grid on Gamma.
///
/// Radial differentiation uses finite-difference stencils of width 9 along
/// full diameters: near the pole a stencil reaches across onto the antipodal
/// column (theta + pi), which is the parity-correct pole treatment. Angular
/// differentiation is spectral.
///
/// The grid is immutable after construction and shared by Field values.
class Grid {
public:
  static constexpr int kStencil = 9;

  Grid(const StarDomain& domain, int nr, int nth);

  int nr() const { return nr_; }
  int nth() const { return nth_; }
  int size() const { return nr_ * nth_; }
  int index(int i, int j) const { return i * nth_ + j; }

  double ds() const { return ds_; }
  double dtheta() const { return dth_; }
  double s(int i) const { return s_[i]; }
  double theta(int j) const { return th_[j]; }

  // Boundary frame (exact from the domain's radius function).
  double R(int j) const { return R_[j]; }
  double boundary_line_element(int j) const { return ell_[j]; }  // |x_theta| on Gamma
  double normal_x(int j) const { return nx_[j]; }
  double normal_y(int j) const { return ny_[j]; }
  double curvature(int j) const { return kappa_[j]; }

  // Cartesian node positions.
  double x(int i, int j) const { return s_[i] * R_[j] * cth_[j]; }
  double y(int i, int j) const { return s_[i] * R_[j] * sth_[j]; }

  /// Cutoff weight mu in [0, 1]: 0 on |x| <= rho, 1 on dist(x, Gamma) <= sigma,
  /// quintic smoothstep in between.
  double mu(int i, int j) const { return mu_[index(i, j)]; }

  bool is_disk() const { return is_disk_; }

  // --- quadrature -----------------------------------------------------------
  /// Integral over the domain (the radial rule integrates polynomials up to
  /// degree 8 exactly; the angular rule is a spectral trapezoid).
  double integrate(std::span<const double> nodal) const;
  /// Line integral over Gamma of a boundary sample.
  double integrate_boundary(std::span<const double> boundary) const;

  // --- raw machinery used by the differentiation and elliptic layers --------
  const std::vector<int>& stencil_index() const { return didx_; }
  const std::vector<double>& stencil_w1() const { return dw1_; }
  const std::vector<double>& stencil_w2() const { return dw2_; }
  /// Chart-derivative scale: d/ds = R(theta_j) * d/dxi along the diameter.
  double column_scale(int j) const { return R_[j]; }

  // Chart factors for Cartesian first derivatives:
  //   u_x = gxs * u_s + gxt * u_theta,  u_y = gys * u_s + gyt * u_theta.
  double gxs(int j) const { return gxs_[j]; }
  double gys(int j) const { return gys_[j]; }
  double gxt(int i, int j) const { return gxt_[index(i, j)]; }
  double gyt(int i, int j) const { return gyt_[index(i, j)]; }

  // Chart factor fields for Cartesian second derivatives:
  //   u_ab = c_ss u_ss + c_st u_{s theta} + c_tt u_{theta theta}
  //        + c_s u_s + c_t u_theta,  ab in {xx, xy, yy}.
  struct SecondFactors {
    std::vector<double> c_ss, c_st, c_tt, c_s, c_t;
  };
  const SecondFactors& fxx() const { return fxx_; }
  const SecondFactors& fxy() const { return fxy_; }
  const SecondFactors& fyy() const { return fyy_; }

  const std::vector<double>& radial_weights() const { return wrad_; }

  RingTransform& ring() const { return *ring_; }

private:
  void build_stencils();
  void build_factors();
  void build_quadrature();
  void build_mu(const StarDomain& domain);

  int nr_, nth_;
  double ds_, dth_;
  bool is_disk_ = false;
  std::vector<double> s_, th_, cth_, sth_;
  std::vector<double> R_, Rp_, Rpp_, ell_, nx_, ny_, kappa_;
  std::vector<double> mu_;
  std::vector<double> wrad_;

  // Per-node width-9 diameter stencils, flattened: entry (i, j, k) lives at
  // ((i * nth + j) * kStencil + k).
  std::vector<int> didx_;
  std::vector<double> dw1_, dw2_;

  std::vector<double> gxs_, gys_, gxt_, gyt_;
  SecondFactors fxx_, fxy_, fyy_;

  std::unique_ptr<RingTransform> ring_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(const StarDomain& domain, int nr, int nth);

/// Fornberg finite-difference weights: fills w[k][deriv] for derivatives up to
/// maxorder at point x0 from the given nodes. Standard recursion, exact for
/// polynomials of degree nodes.size()-1.
void fd_weights(double x0, std::span<const double> nodes, int maxorder,
                std::vector<std::vector<double>>& w);

}  // namespace stefan2d
