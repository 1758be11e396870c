/// Extremal-operator checks: closed forms on fixed Hessians, exact duality
/// and superadditivity over random matrices, half-eigenvalue scaling laws,
/// the policy solver against the quarter barrier, and the subsolution guard.
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "stefan2d/eigenpair.hpp"
#include "stefan2d/pucci.hpp"

using namespace stefan2d;

namespace {

GridPtr disk(int nr = 32, int nth = 32) { return build_grid(StarDomain::disk(), nr, nth); }

}  // namespace

TEST_CASE("extremal values of fixed Hessians") {
  PucciParams p{1.0, 2.0, 0.0};
  // eigenvalues 2 and -3: minimal puts mu1 on the positive, mu2 on the negative
  CHECK(pucci_minus_matrix(2.0, 0.0, -3.0, p) == doctest::Approx(-4.0).epsilon(1e-14));
  CHECK(pucci_plus_matrix(2.0, 0.0, -3.0, p) == doctest::Approx(1.0).epsilon(1e-14));
  // pure shear has eigenvalues +-1
  CHECK(pucci_minus_matrix(0.0, 1.0, 0.0, p) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(pucci_plus_matrix(0.0, 1.0, 0.0, p) == doctest::Approx(1.0).epsilon(1e-14));
  // definite Hessians collapse to a scaled trace
  CHECK(pucci_minus_matrix(1.0, 0.0, 1.0, p) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(pucci_minus_matrix(-1.0, 0.0, -2.0, p) == doctest::Approx(-6.0).epsilon(1e-14));
}

TEST_CASE("unit interval collapses both operators to the trace") {
  PucciParams p{1.0, 1.0, 0.0};
  std::mt19937 rng(13u);
  std::uniform_real_distribution<double> U(-5.0, 5.0);
  for (int n = 0; n < 200; ++n) {
    double hxx = U(rng), hxy = U(rng), hyy = U(rng);
    CHECK(pucci_minus_matrix(hxx, hxy, hyy, p) == doctest::Approx(hxx + hyy).epsilon(1e-13));
    CHECK(pucci_plus_matrix(hxx, hxy, hyy, p) == doctest::Approx(hxx + hyy).epsilon(1e-13));
  }
}

TEST_CASE("duality of the extremal pair is exact in floating point") {
  std::mt19937 rng(71u);
  std::uniform_real_distribution<double> U(-5.0, 5.0), M1(0.4, 1.0), M2(1.0, 2.5);
  int bad = 0;
  for (int n = 0; n < 1000; ++n) {
    PucciParams p{M1(rng), M2(rng), 0.0};
    double hxx = U(rng), hxy = U(rng), hyy = U(rng);
    if (pucci_plus_matrix(hxx, hxy, hyy, p) != -pucci_minus_matrix(-hxx, -hxy, -hyy, p)) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("minimal operator is superadditive") {
  std::mt19937 rng(29u);
  std::uniform_real_distribution<double> U(-5.0, 5.0), M1(0.4, 1.0), M2(1.0, 2.5);
  for (int n = 0; n < 1000; ++n) {
    PucciParams p{M1(rng), M2(rng), 0.0};
    double axx = U(rng), axy = U(rng), ayy = U(rng);
    double bxx = U(rng), bxy = U(rng), byy = U(rng);
    double lhs = pucci_minus_matrix(axx + bxx, axy + bxy, ayy + byy, p);
    double rhs = pucci_minus_matrix(axx, axy, ayy, p) + pucci_minus_matrix(bxx, bxy, byy, p);
    double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    CHECK(lhs >= rhs - 1e-12 * scale);
  }
}

TEST_CASE("half-eigenvalue scaling on the unit interval") {
  auto g = disk();
  EigenPair e = dirichlet_eigenpair(g);
  HalfEigenpair base = half_eigenpair(PucciParams{1.0, 1.0, 0.0}, g);
  CHECK(base.lambda == doctest::Approx(e.lambda).epsilon(1e-6));
  CHECK(base.residual < 1e-5);
  for (double mu : {0.5, 2.0}) {
    HalfEigenpair h = half_eigenpair(PucciParams{mu, mu, 0.0}, g);
    CHECK(h.lambda == doctest::Approx(mu * base.lambda).epsilon(1e-9));
  }
}

TEST_CASE("widening the class raises the half-eigenvalue at a unit rate") {
  auto g = disk();
  HalfEigenpair base = half_eigenpair(PucciParams{1.0, 1.0, 0.0}, g);
  double prev = base.lambda;
  for (double s : {0.05, 0.10, 0.15, 0.20}) {
    HalfEigenpair h = half_eigenpair(PucciParams{1.0 - s, 1.0 + s, 0.0}, g);
    CHECK(h.lambda > prev + 0.25);
    double slope = (h.lambda - base.lambda) / s / base.lambda;
    CHECK(slope > 0.8);
    CHECK(slope < 1.3);
    prev = h.lambda;
  }
}

TEST_CASE("reference class pins both branches") {
  auto g = disk(64, 64);
  PucciParams p{1.0, 1.2, 0.0};
  HalfEigenpair plus = half_eigenpair(p, g);
  NegativeHalfEigenpair minus = negative_half_eigenpair(p, g);
  EigenPair e = dirichlet_eigenpair(g);
  CHECK(plus.lambda == doctest::Approx(6.964479026).epsilon(1e-6));
  CHECK(minus.lambda == doctest::Approx(5.766281950).epsilon(1e-6));
  // interlacing: the negative branch dips below the Laplacian, the positive
  // branch climbs above it
  CHECK(minus.lambda < e.lambda);
  CHECK(e.lambda < plus.lambda);
  // positive branch satisfies a quantitative Hopf inequality
  CHECK(plus.rho.max() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(chi(plus.rho) > 1e-3);
  CHECK(minus.rho.min() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(minus.rho.max() <= 1e-12);
}

TEST_CASE("policy solver reproduces the quarter barrier") {
  auto g = disk();
  PucciParams id{1.0, 1.0, 0.0};
  Field f1(g, 1.0);
  PolicyResult pr = policy_solve(f1, id);
  double worst = 0.0;
  for (int i = 0; i < g->nr(); ++i)
    for (int j = 0; j < g->nth(); ++j) {
      double r2 = g->x(i, j) * g->x(i, j) + g->y(i, j) * g->y(i, j);
      worst = std::max(worst, std::abs(pr.u(i, j) - 0.25 * (1.0 - r2)));
    }
  CHECK(worst < 1e-10);
  CHECK(pr.iterations <= 2);
  CHECK(pr.residual < 1e-8);

  Field f0(g);
  CHECK(policy_solve(f0, id).u.max_abs() == 0.0);

  PolicyResult pw = policy_solve(f1, PucciParams{1.0, 2.0, 0.0});
  CHECK(pw.residual < 1e-8);
  CHECK(pw.u.min() >= 0.0);
}

TEST_CASE("subsolution residual accepts the identity class and guards it") {
  auto g = disk();
  PucciParams id{1.0, 1.0, 0.0};
  HalfEigenpair h = half_eigenpair(id, g);
  Field one(g, 1.0), zf(g);
  HeatCoefficients idc{one, zf, one, zf, zf};
  CHECK(std::abs(subsolution_residual(h.lambda, h.rho, idc, id)) < 1e-6);

  Field big(g, 1.5);
  HeatCoefficients bad{big, zf, one, zf, zf};
  CHECK_THROWS_AS((void)subsolution_residual(h.lambda, h.rho, bad, PucciParams{1.0, 1.2, 0.0}),
                  std::domain_error);
}

TEST_CASE("parameter validation rejects malformed classes") {
  CHECK_THROWS_AS((PucciParams{0.0, 1.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PucciParams{-1.0, 1.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PucciParams{1.5, 1.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((PucciParams{1.0, 1.2, -0.1}.validate()), std::invalid_argument);
  CHECK_NOTHROW((PucciParams{0.5, 2.0, 0.3}.validate()));
}
