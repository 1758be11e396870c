/// Dirichlet eigenpair, barrier, and comparison-function checks. The unit
/// disk has closed forms for everything here: the principal eigenvalue is the
/// square of the first zero of J_0 (computed below by series plus bisection,
/// so the target never touches solver code), the barrier is (1-r^2)/4, and
/// the eigenfunction is radial.
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "stefan2d/diagnostics.hpp"
#include "stefan2d/eigenpair.hpp"
#include "stefan2d/field.hpp"
#include "stefan2d/grid.hpp"

using namespace stefan2d;

namespace {

double bessel_j0(double x) {
  double term = 1.0, sum = 1.0, q = 0.25 * x * x;
  for (int m = 1; m <= 24; ++m) {
    term *= -q / (static_cast<double>(m) * m);
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

double j01() {
  double lo = 2.0, hi = 3.0;
  for (int it = 0; it < 200 && hi - lo >= 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    (bessel_j0(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

GridPtr disk(int nr, int nth) { return build_grid(StarDomain::disk(), nr, nth); }

}  // namespace

TEST_CASE("first zero of J_0 from the series oracle") {
  // The root itself, pinned so a broken oracle cannot silently loosen the
  // eigenvalue checks below.
  CHECK(j01() == doctest::Approx(2.4048255577).epsilon(1e-10));
}

TEST_CASE("principal eigenvalue matches the Bessel root") {
  auto g = disk(64, 64);
  EigenPair e = dirichlet_eigenpair(g);
  double target = j01() * j01();
  CHECK(std::abs(e.lambda - target) < 1e-4);
  CHECK(e.residual < 1e-6);

  auto g2 = disk(128, 128);
  EigenPair e2 = dirichlet_eigenpair(g2);
  CHECK(std::abs(e2.lambda - target) < 1e-6);
}

TEST_CASE("eigenvalue scales as 1/R^2 on a dilated disk") {
  auto g = build_grid(StarDomain::disk(2.0), 64, 64);
  EigenPair e = dirichlet_eigenpair(g);
  double target = j01() * j01() / 4.0;
  CHECK(std::abs(e.lambda - target) < 1e-4);
}

TEST_CASE("eigenfunction is normalized, positive, and radial") {
  auto g = disk(64, 64);
  EigenPair e = dirichlet_eigenpair(g);

  std::vector<double> sq(e.phi.v.size());
  for (size_t k = 0; k < sq.size(); ++k) sq[k] = e.phi.v[k] * e.phi.v[k];
  CHECK(g->integrate(sq) == doctest::Approx(1.0).epsilon(1e-10));

  for (int i = 0; i + 1 < g->nr(); ++i)
    for (int j = 0; j < g->nth(); ++j) CHECK(e.phi(i, j) > 0.0);

  // Angular variance vanishes on the disk.
  for (int i = 0; i < g->nr(); ++i) {
    double mean = 0.0;
    for (int j = 0; j < g->nth(); ++j) mean += e.phi(i, j);
    mean /= g->nth();
    double var = 0.0;
    for (int j = 0; j < g->nth(); ++j) var += (e.phi(i, j) - mean) * (e.phi(i, j) - mean);
    CHECK(var / g->nth() < 1e-8);
  }
}

TEST_CASE("rayleigh quotient reproduces the eigenvalue") {
  auto g = disk(64, 64);
  EigenPair e = dirichlet_eigenpair(g);
  CHECK(rayleigh_quotient(e.phi) == doctest::Approx(e.lambda).epsilon(1e-8));
}

TEST_CASE("eigenvalue refinement is monotone in resolution") {
  double lam16 = dirichlet_eigenpair(disk(16, 16)).lambda;
  double lam32 = dirichlet_eigenpair(disk(32, 32)).lambda;
  double lam64 = dirichlet_eigenpair(disk(64, 64)).lambda;
  double gap1 = std::abs(lam32 - lam16), gap2 = std::abs(lam64 - lam32);
  CHECK(gap2 < gap1);
}

TEST_CASE("barrier solves laplacian psi = -1 with the disk closed form") {
  auto g = disk(48, 64);
  Field psi = barrier_psi(g);
  double err = 0.0;
  for (int i = 0; i < g->nr(); ++i)
    for (int j = 0; j < g->nth(); ++j) {
      double r2 = g->x(i, j) * g->x(i, j) + g->y(i, j) * g->y(i, j);
      err = std::max(err, std::abs(psi(i, j) - 0.25 * (1.0 - r2)));
    }
  CHECK(err < 1e-6);
}

TEST_CASE("hopf margins of the eigenfunction and the barrier") {
  auto g = disk(64, 64);
  EigenPair e = dirichlet_eigenpair(g);
  Field psi = barrier_psi(g);
  // chi is the smallest inward flux over the boundary ring.
  CHECK(chi(e.phi) > 1e-3);
  CHECK(chi(psi) > 1e-3);
  // On the unit disk the barrier's normal derivative is exactly -1/2.
  CHECK(chi(psi) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("expansion coefficients against the first eigenfunction") {
  auto g = disk(64, 64);
  EigenPair e1 = dirichlet_eigenpair(g);
  CHECK(c1(e1.phi, e1.phi) == doctest::Approx(1.0).epsilon(1e-10));

  EigenPair e2 = second_eigenpair(g, e1);
  CHECK(e2.lambda > e1.lambda);
  CHECK(std::abs(c1(e2.phi, e1.phi)) < 1e-6);
}

TEST_CASE("comparison function stays positive below the kappa2 threshold") {
  auto g = disk(64, 64);
  EigenPair e = dirichlet_eigenpair(g);
  Field psi = barrier_psi(g);
  double k2max = kappa2_threshold(e.phi, psi);
  CHECK(k2max > 0.0);

  Field F = comparison_F(1.0, 0.5 * k2max, 0.0, e.lambda, e.phi, psi);
  for (int i = 0; i + 1 < g->nr(); ++i)
    for (int j = 0; j < g->nth(); ++j) CHECK(F(i, j) > 0.0);

  // At the threshold itself the minimum is zero to roundoff; above it the
  // function dips negative somewhere.
  Field Fover = comparison_F(1.0, 2.0 * k2max, 0.0, e.lambda, e.phi, psi);
  CHECK(Fover.min() < 0.0);

  // The time factor scales the whole field.
  Field Ft = comparison_F(1.0, 0.5 * k2max, 0.3, e.lambda, e.phi, psi);
  double decay = std::exp(-1.5 * e.lambda * 0.3);
  for (size_t k = 0; k < Ft.v.size(); ++k)
    CHECK(Ft.v[k] == doctest::Approx(decay * F.v[k]).epsilon(1e-12));
}
