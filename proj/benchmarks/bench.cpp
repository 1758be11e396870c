#include <benchmark/benchmark.h>

#include <cmath>

#include "stefan2d/derivatives.hpp"
#include "stefan2d/elliptic.hpp"
#include "stefan2d/grid.hpp"
#include "stefan2d/stefan.hpp"

using namespace stefan2d;

static GridPtr bench_grid(int n) { return build_grid(StarDomain::disk(), n, n); }

static void BM_BuildGrid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto g = build_grid(StarDomain::disk(), n, n);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_BuildGrid)->Arg(64)->Arg(128);

static void BM_Hessian(benchmark::State& state) {
  auto g = bench_grid(static_cast<int>(state.range(0)));
  Field u(g);
  for (int i = 0; i < g->nr(); ++i) {
    for (int j = 0; j < g->nth(); ++j) u(i, j) = g->x(i, j) * g->x(i, j) * g->y(i, j);
  }
  for (auto _ : state) {
    Hessian H = hessian(u);
    benchmark::DoNotOptimize(H.xx.v.data());
  }
}
BENCHMARK(BM_Hessian)->Arg(64)->Arg(128);

static void BM_PoissonSolve(benchmark::State& state) {
  auto g = bench_grid(static_cast<int>(state.range(0)));
  Field f(g, -1.0);
  BoundaryField bc(g, 0.0);
  EllipticCoefficients co(g);
  EllipticSolver solver(g, co);
  for (auto _ : state) {
    EllipticSolution sol = solver.solve(f, bc);
    benchmark::DoNotOptimize(sol.u.v.data());
  }
}
BENCHMARK(BM_PoissonSolve)->Arg(64)->Arg(128);

static void BM_SolverSetup(benchmark::State& state) {
  auto g = bench_grid(static_cast<int>(state.range(0)));
  EllipticCoefficients co(g);
  for (auto _ : state) {
    EllipticSolver solver(g, co);
    benchmark::DoNotOptimize(&solver);
  }
}
BENCHMARK(BM_SolverSetup)->Arg(64)->Arg(128);

static void BM_GaugeMake(benchmark::State& state) {
  auto g = bench_grid(static_cast<int>(state.range(0)));
  GaugeSolver gauge(g);
  BoundaryField h(g), zero(g);
  for (int j = 0; j < g->nth(); ++j) h[j] = 0.02 * std::cos(3.0 * g->theta(j));
  for (auto _ : state) {
    GaugeState gs = gauge.make(h, zero);
    benchmark::DoNotOptimize(gs.jac.v.data());
  }
}
BENCHMARK(BM_GaugeMake)->Arg(64)->Arg(128);

static void BM_CoupledStep(benchmark::State& state) {
  SimConfig cfg;
  cfg.nr = cfg.nth = static_cast<int>(state.range(0));
  StefanSim sim(cfg);
  StefanState s0 = sim.initial_state();
  for (auto _ : state) {
    StefanState s1 = sim.step(s0);
    benchmark::DoNotOptimize(s1.q.v.data());
  }
}
BENCHMARK(BM_CoupledStep)->Arg(64)->Arg(128);

static void BM_DiagnosticsIngest(benchmark::State& state) {
  SimConfig cfg;
  cfg.nr = cfg.nth = static_cast<int>(state.range(0));
  StefanSim sim(cfg);
  StefanState s0 = sim.initial_state();
  StefanState s1 = sim.step(s0);
  for (auto _ : state) {
    DiagnosticsAccumulator acc(sim.grid(), 5.783185962949163, 0.5783185962949163);
    acc.ingest(s0, nullptr);
    DiagnosticsRow row = acc.ingest(s1, &s0);
    benchmark::DoNotOptimize(row.E_disc);
  }
}
BENCHMARK(BM_DiagnosticsIngest)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
