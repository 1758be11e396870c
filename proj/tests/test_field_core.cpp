/// Grid, quadrature, derivative and elliptic-solver checks against closed
/// forms. Everything here is exact for the discretization (polynomial radial
/// profiles, band-limited angular profiles), so tolerances are near roundoff
/// and any formula error shows up as an O(1) miss.
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "stefan2d/derivatives.hpp"
#include "stefan2d/elliptic.hpp"
#include "stefan2d/field.hpp"
#include "stefan2d/grid.hpp"

using namespace stefan2d;

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
Field sample(const GridPtr& g, F&& f) {
  Field u(g);
  for (int i = 0; i < g->nr(); ++i) {
    for (int j = 0; j < g->nth(); ++j) u(i, j) = f(g->x(i, j), g->y(i, j));
  }
  return u;
}

double max_err(const Field& a, const Field& b) {
  double m = 0.0;
  for (size_t k = 0; k < a.v.size(); ++k) m = std::max(m, std::abs(a.v[k] - b.v[k]));
  return m;
}

GridPtr disk_grid(int nr = 48, int nth = 64) { return build_grid(StarDomain::disk(), nr, nth); }

GridPtr star_grid(int nr = 48, int nth = 64) {
  return build_grid(StarDomain::from_cosine_modes(1.0, {{3, 0.1}}), nr, nth);
}

}  // namespace

TEST_CASE("fd_weights reproduces the classic central stencils") {
  std::vector<double> nodes{-1.0, 0.0, 1.0};
  std::vector<std::vector<double>> w;
  fd_weights(0.0, nodes, 2, w);
  CHECK(w[0][1] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(w[1][1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(w[2][1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(w[0][2] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w[1][2] == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(w[2][2] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("grid layout: staggered radius, boundary ring on Gamma") {
  auto g = disk_grid();
  CHECK(g->s(0) == doctest::Approx(0.5 * g->ds()));
  CHECK(g->s(g->nr() - 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g->is_disk());
  CHECK_FALSE(star_grid()->is_disk());
}

TEST_CASE("quadrature: closed-form areas and moments") {
  auto g = disk_grid();
  Field one(g, 1.0);
  CHECK(g->integrate(one.v) == doctest::Approx(kPi).epsilon(1e-14));

  // integral of (1 - r^2)/4 over the unit disk is pi/8
  Field psi = sample(g, [](double x, double y) { return 0.25 * (1.0 - x * x - y * y); });
  CHECK(g->integrate(psi.v) == doctest::Approx(kPi / 8.0).epsilon(1e-13));

  // integral of x^2 y^2 over the unit disk is pi/24
  Field m = sample(g, [](double x, double y) { return x * x * y * y; });
  CHECK(g->integrate(m.v) == doctest::Approx(kPi / 24.0).epsilon(1e-13));

  // area of the domain R = 1 + eps cos(3 theta) is pi (1 + eps^2/2)
  auto gs = star_grid();
  Field ones(gs, 1.0);
  CHECK(gs->integrate(ones.v) == doctest::Approx(kPi * 1.005).epsilon(1e-13));
}

TEST_CASE("boundary quadrature matches a dense reference") {
  auto g = disk_grid();
  BoundaryField one(g, 1.0);
  CHECK(g->integrate_boundary(one.v) == doctest::Approx(2.0 * kPi).epsilon(1e-14));

  auto gs = star_grid();
  BoundaryField ones(gs, 1.0);
  // dense trapezoid reference for the perimeter of R = 1 + 0.1 cos(3 theta)
  const int N = 1 << 14;
  double ref = 0.0;
  for (int k = 0; k < N; ++k) {
    const double th = 2.0 * kPi * k / N;
    const double R = 1.0 + 0.1 * std::cos(3.0 * th);
    const double Rp = -0.3 * std::sin(3.0 * th);
    ref += std::sqrt(R * R + Rp * Rp) * (2.0 * kPi / N);
  }
  CHECK(gs->integrate_boundary(ones.v) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("ring transform: roundtrip and derivative multipliers") {
  RingTransform ring(64);
  std::vector<double> u(64), back(64);
  for (int j = 0; j < 64; ++j) {
    const double th = 2.0 * kPi * j / 64;
    u[j] = 1.0 + std::cos(3.0 * th) - 2.0 * std::sin(7.0 * th);
  }
  std::vector<std::complex<double>> modes(ring.nmodes());
  ring.to_modes(u.data(), modes.data());
  CHECK(std::abs(modes[3] - std::complex<double>(0.5, 0.0)) < 1e-14);
  CHECK(std::abs(modes[7] - std::complex<double>(0.0, 1.0)) < 1e-14);
  ring.to_ring(modes.data(), back.data());
  for (int j = 0; j < 64; ++j) CHECK(back[j] == doctest::Approx(u[j]).epsilon(1e-14));

  // sixth derivative of cos(3 theta) is -729 cos(3 theta); the attainable
  // accuracy is the roundoff floor amplified by (n/2)^6 from leaked high modes
  std::vector<double> c3(64), d6(64);
  for (int j = 0; j < 64; ++j) c3[j] = std::cos(3.0 * (2.0 * kPi * j / 64));
  ring.to_modes(c3.data(), modes.data());
  ring.derivative_modes(modes.data(), 6);
  ring.to_ring(modes.data(), d6.data());
  for (int j = 0; j < 64; ++j) CHECK(std::abs(d6[j] + 729.0 * c3[j]) < 1e-6);
}

TEST_CASE("cartesian derivatives are exact on polynomials (disk)") {
  auto g = disk_grid();
  Field u = sample(g, [](double x, double y) { return x * x * x * y; });
  CHECK(max_err(differentiate(u, 1, 0), sample(g, [](double x, double y) {
          return 3.0 * x * x * y;
        })) < 1e-11);
  CHECK(max_err(differentiate(u, 0, 1), sample(g, [](double x, double) {
          return x * x * x;
        })) < 1e-11);
  CHECK(max_err(differentiate(u, 2, 0), sample(g, [](double x, double y) {
          return 6.0 * x * y;
        })) < 1e-10);
  CHECK(max_err(differentiate(u, 1, 1), sample(g, [](double x, double) {
          return 3.0 * x * x;
        })) < 1e-10);
  CHECK(max_err(differentiate(u, 0, 2), Field(g, 0.0)) < 1e-10);
  CHECK_THROWS_AS(differentiate(u, 2, 1), std::invalid_argument);
}

TEST_CASE("cartesian derivatives are exact on polynomials (star domain)") {
  auto g = star_grid();
  Field u = sample(g, [](double x, double y) { return x * x + 2.0 * x * y - y * y; });
  Hessian H = hessian(u);
  CHECK(max_err(H.xx, Field(g, 2.0)) < 1e-9);
  CHECK(max_err(H.xy, Field(g, 2.0)) < 1e-9);
  CHECK(max_err(H.yy, Field(g, -2.0)) < 1e-9);
  Gradient d = gradient(u);
  CHECK(max_err(d.x, sample(g, [](double x, double y) { return 2.0 * x + 2.0 * y; })) < 1e-11);
  CHECK(max_err(d.y, sample(g, [](double x, double y) { return 2.0 * x - 2.0 * y; })) < 1e-11);
}

TEST_CASE("boundary trace and normal derivative") {
  auto g = star_grid();
  Field u = sample(g, [](double x, double y) { return x * x + y * y; });
  BoundaryField tr = boundary_trace(u);
  for (int j = 0; j < g->nth(); ++j) {
    CHECK(tr[j] == doctest::Approx(g->R(j) * g->R(j)).epsilon(1e-13));
  }
  // grad u = 2 x, so du/dN = 2 x . N = 2 R^2 / |x_theta| on Gamma
  BoundaryField dn = normal_derivative(u);
  for (int j = 0; j < g->nth(); ++j) {
    const double expect = 2.0 * g->R(j) * g->R(j) / g->boundary_line_element(j);
    CHECK(dn[j] == doctest::Approx(expect).epsilon(1e-11));
  }
}

TEST_CASE("boundary sobolev norms from modes") {
  auto g = disk_grid();
  BoundaryField h(g);
  for (int j = 0; j < g->nth(); ++j) h[j] = std::cos(2.0 * g->theta(j));
  CHECK(boundary_hs_sq(h, 0.0) == doctest::Approx(kPi).epsilon(1e-13));
  CHECK(boundary_hs_sq(h, 1.0) == doctest::Approx(5.0 * kPi).epsilon(1e-13));
  CHECK(boundary_hs_sq(h, 4.5) == doctest::Approx(std::pow(5.0, 4.5) * kPi).epsilon(1e-13));
}

TEST_CASE("cutoff weight: zero core, unit collar, monotone") {
  auto g = disk_grid();
  for (int i = 0; i < g->nr(); ++i) {
    if (g->s(i) <= 0.3) CHECK(g->mu(i, 0) == 0.0);
    if (g->s(i) >= 0.8) CHECK(g->mu(i, 0) == 1.0);
    if (i > 0) CHECK(g->mu(i, 0) >= g->mu(i - 1, 0));
  }
}

TEST_CASE("poisson solve on the disk: membrane and harmonic closed forms") {
  auto g = disk_grid();
  // laplacian u = -1, u = 0 on Gamma  ->  u = (1 - r^2)/4
  Field f(g, -1.0);
  BoundaryField zero(g, 0.0);
  EllipticSolution sol = solve_poisson(f, zero);
  CHECK(sol.converged);
  CHECK(sol.iterations <= 5);
  Field exact = sample(g, [](double x, double y) { return 0.25 * (1.0 - x * x - y * y); });
  CHECK(max_err(sol.u, exact) < 1e-11);

  // harmonic extension of cos(3 theta) is r^3 cos(3 theta)
  Field zf(g, 0.0);
  BoundaryField bc(g);
  for (int j = 0; j < g->nth(); ++j) bc[j] = std::cos(3.0 * g->theta(j));
  EllipticSolution harm = solve_poisson(zf, bc);
  CHECK(harm.converged);
  Field hex = sample(g, [](double x, double y) {
    // r^3 cos(3 theta) = x^3 - 3 x y^2
    return x * x * x - 3.0 * x * y * y;
  });
  CHECK(max_err(harm.u, hex) < 1e-11);
}

TEST_CASE("poisson solve on a star domain: quadratic closed form") {
  auto g = star_grid();
  Field f(g, 4.0);
  BoundaryField bc(g);
  for (int j = 0; j < g->nth(); ++j) bc[j] = g->R(j) * g->R(j);
  EllipticSolution sol = solve_poisson(f, bc);
  CHECK(sol.converged);
  Field exact = sample(g, [](double x, double y) { return x * x + y * y; });
  CHECK(max_err(sol.u, exact) < 1e-9);
}

TEST_CASE("variable-coefficient solve against a manufactured polynomial") {
  auto g = star_grid();
  EllipticCoefficients co(g);
  co.a11 = sample(g, [](double x, double) { return 1.0 + 0.3 * x * x; });
  co.a22 = sample(g, [](double, double y) { return 1.0 + 0.2 * y * y; });
  co.a12 = sample(g, [](double x, double y) { return 0.1 * x * y; });
  co.b1 = sample(g, [](double, double y) { return 0.5 * y; });
  co.b2 = sample(g, [](double x, double) { return -0.3 * x; });
  co.c = Field(g, -1.0);

  // u = x^3 y: u_x = 3x^2 y, u_y = x^3, u_xx = 6xy, u_xy = 3x^2, u_yy = 0
  Field exact = sample(g, [](double x, double y) { return x * x * x * y; });
  Field f = sample(g, [](double x, double y) {
    const double a11 = 1.0 + 0.3 * x * x;
    const double a12 = 0.1 * x * y;
    return a11 * 6.0 * x * y + 2.0 * a12 * 3.0 * x * x + 0.5 * y * 3.0 * x * x * y +
           (-0.3 * x) * x * x * x - x * x * x * y;
  });
  BoundaryField bc(g);
  for (int j = 0; j < g->nth(); ++j) {
    const double x = g->x(g->nr() - 1, j);
    const double y = g->y(g->nr() - 1, j);
    bc[j] = x * x * x * y;
  }

  EllipticSolver solver(g, co);
  // the operator application itself must reproduce f on the exact solution
  Field Lu = solver.apply(exact);
  CHECK(max_err(Lu, f) < 1e-9);

  EllipticSolution sol = solver.solve(f, bc);
  CHECK(sol.converged);
  CHECK(sol.iterations < 100);
  CHECK(max_err(sol.u, exact) < 1e-8);

  // warm start from the answer needs no iterations
  EllipticSolution again = solver.solve(f, bc, &sol.u);
  CHECK(again.converged);
  CHECK(again.iterations == 0);
}

TEST_CASE("zero data short-circuits") {
  auto g = disk_grid();
  EllipticSolution sol = solve_poisson(Field(g, 0.0), BoundaryField(g, 0.0));
  CHECK(sol.converged);
  CHECK(sol.iterations == 0);
  CHECK(sol.u.max_abs() == 0.0);
}

TEST_CASE("harmonic functions obey the maximum principle") {
  auto g = star_grid(32, 48);
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    BoundaryField bc(g);
    for (int j = 0; j < g->nth(); ++j) {
      double v = 0.0;
      for (int m = 0; m <= 5; ++m) {
        v += coef(rng) * std::cos(m * g->theta(j)) + coef(rng) * std::sin(m * g->theta(j));
      }
      bc[j] = v;
    }
    EllipticSolution sol = solve_poisson(Field(g, 0.0), bc);
    REQUIRE(sol.converged);
    const double bmin = *std::min_element(bc.v.begin(), bc.v.end());
    const double bmax = *std::max_element(bc.v.begin(), bc.v.end());
    CHECK(sol.u.min() >= bmin - 1e-9);
    CHECK(sol.u.max() <= bmax + 1e-9);
  }
}
