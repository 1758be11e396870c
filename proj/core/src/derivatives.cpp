#include "stefan2d/derivatives.hpp"

#include <numbers>
#include <stdexcept>

namespace stefan2d {

namespace {

// Gather-apply one of the precomputed radial stencil weight sets.
Field apply_radial(const Field& u, const std::vector<double>& w, int power) {
  const Grid& g = *u.grid;
  Field out(u.grid);
  const int W = Grid::kStencil;
  const auto& idx = g.stencil_index();
  for (int j = 0; j < g.nth(); ++j) {
    const double scale = power == 1 ? g.column_scale(j) : g.column_scale(j) * g.column_scale(j);
    for (int i = 0; i < g.nr(); ++i) {
      const size_t base = (static_cast<size_t>(i) * g.nth() + j) * W;
      double acc = 0.0;
      for (int k = 0; k < W; ++k) acc += w[base + k] * u.v[idx[base + k]];
      out(i, j) = scale * acc;
    }
  }
  return out;
}

}  // namespace

Field chart_ds(const Field& u) { return apply_radial(u, u.grid->stencil_w1(), 1); }
Field chart_dss(const Field& u) { return apply_radial(u, u.grid->stencil_w2(), 2); }

Field chart_dtheta(const Field& u, int order) {
  const Grid& g = *u.grid;
  Field out(u.grid);
  auto& ring = g.ring();
  std::vector<std::complex<double>> modes(ring.nmodes());
  for (int i = 0; i < g.nr(); ++i) {
    ring.to_modes(u.v.data() + static_cast<size_t>(i) * g.nth(), modes.data());
    ring.derivative_modes(modes.data(), order);
    ring.to_ring(modes.data(), out.v.data() + static_cast<size_t>(i) * g.nth());
  }
  return out;
}

Field chart_dstheta(const Field& u) { return chart_dtheta(chart_ds(u), 1); }

Field differentiate(const Field& u, int ax, int ay) {
  if (ax < 0 || ay < 0 || ax + ay > 2) {
    throw std::invalid_argument("differentiate: multi-index order must be 0, 1 or 2");
  }
  const Grid& g = *u.grid;
  const int order = ax + ay;
  if (order == 0) return u;

  if (order == 1) {
    const Field us = chart_ds(u);
    const Field ut = chart_dtheta(u, 1);
    Field out(u.grid);
    for (int i = 0; i < g.nr(); ++i) {
      for (int j = 0; j < g.nth(); ++j) {
        const int id = g.index(i, j);
        if (ax == 1) {
          out.v[id] = g.gxs(j) * us.v[id] + g.gxt(i, j) * ut.v[id];
        } else {
          out.v[id] = g.gys(j) * us.v[id] + g.gyt(i, j) * ut.v[id];
        }
      }
    }
    return out;
  }

  const Grid::SecondFactors& f = (ax == 2) ? g.fxx() : (ay == 2) ? g.fyy() : g.fxy();
  const Field us = chart_ds(u);
  const Field uss = chart_dss(u);
  const Field ut = chart_dtheta(u, 1);
  const Field utt = chart_dtheta(u, 2);
  const Field ust = chart_dtheta(us, 1);
  Field out(u.grid);
  for (int id = 0; id < g.size(); ++id) {
    out.v[id] = f.c_ss[id] * uss.v[id] + f.c_st[id] * ust.v[id] + f.c_tt[id] * utt.v[id] +
                f.c_s[id] * us.v[id] + f.c_t[id] * ut.v[id];
  }
  return out;
}

Gradient gradient(const Field& u) {
  const Grid& g = *u.grid;
  const Field us = chart_ds(u);
  const Field ut = chart_dtheta(u, 1);
  Gradient out{Field(u.grid), Field(u.grid)};
  for (int i = 0; i < g.nr(); ++i) {
    for (int j = 0; j < g.nth(); ++j) {
      const int id = g.index(i, j);
      out.x.v[id] = g.gxs(j) * us.v[id] + g.gxt(i, j) * ut.v[id];
      out.y.v[id] = g.gys(j) * us.v[id] + g.gyt(i, j) * ut.v[id];
    }
  }
  return out;
}

Hessian hessian(const Field& u) {
  const Grid& g = *u.grid;
  const Field us = chart_ds(u);
  const Field uss = chart_dss(u);
  const Field ut = chart_dtheta(u, 1);
  const Field utt = chart_dtheta(u, 2);
  const Field ust = chart_dtheta(us, 1);
  Hessian out{Field(u.grid), Field(u.grid), Field(u.grid)};
  auto combine = [&](const Grid::SecondFactors& f, Field& dst) {
    for (int id = 0; id < g.size(); ++id) {
      dst.v[id] = f.c_ss[id] * uss.v[id] + f.c_st[id] * ust.v[id] + f.c_tt[id] * utt.v[id] +
                  f.c_s[id] * us.v[id] + f.c_t[id] * ut.v[id];
    }
  };
  combine(g.fxx(), out.xx);
  combine(g.fxy(), out.xy);
  combine(g.fyy(), out.yy);
  return out;
}

BoundaryField boundary_trace(const Field& u) {
  const Grid& g = *u.grid;
  BoundaryField b(u.grid);
  const int i = g.nr() - 1;
  for (int j = 0; j < g.nth(); ++j) b[j] = u(i, j);
  return b;
}

BoundaryGradient boundary_gradient(const Field& u) {
  const Grid& g = *u.grid;
  const int i = g.nr() - 1;
  const int W = Grid::kStencil;
  const auto& idx = g.stencil_index();
  const auto& w1 = g.stencil_w1();
  auto& ring = g.ring();

  // u_theta on the boundary ring, spectrally.
  std::vector<double> row(g.nth());
  for (int j = 0; j < g.nth(); ++j) row[j] = u(i, j);
  std::vector<std::complex<double>> modes(ring.nmodes());
  ring.to_modes(row.data(), modes.data());
  ring.derivative_modes(modes.data(), 1);
  std::vector<double> ut(g.nth());
  ring.to_ring(modes.data(), ut.data());

  BoundaryGradient out{BoundaryField(u.grid), BoundaryField(u.grid)};
  for (int j = 0; j < g.nth(); ++j) {
    const size_t base = (static_cast<size_t>(i) * g.nth() + j) * W;
    double acc = 0.0;
    for (int k = 0; k < W; ++k) acc += w1[base + k] * u.v[idx[base + k]];
    const double us = g.column_scale(j) * acc;
    out.x[j] = g.gxs(j) * us + g.gxt(i, j) * ut[j];
    out.y[j] = g.gys(j) * us + g.gyt(i, j) * ut[j];
  }
  return out;
}

BoundaryField normal_derivative(const Field& u) {
  const Grid& g = *u.grid;
  const BoundaryGradient grad = boundary_gradient(u);
  BoundaryField out(u.grid);
  for (int j = 0; j < g.nth(); ++j) {
    out[j] = g.normal_x(j) * grad.x[j] + g.normal_y(j) * grad.y[j];
  }
  return out;
}

BoundaryField angular_derivative(const BoundaryField& h, int order) {
  if (order < 0 || order > 6) throw std::invalid_argument("angular_derivative: order must be 0..6");
  if (order == 0) return h;
  auto& ring = h.grid->ring();
  std::vector<std::complex<double>> modes(ring.nmodes());
  ring.to_modes(h.v.data(), modes.data());
  ring.derivative_modes(modes.data(), order);
  BoundaryField out(h.grid);
  ring.to_ring(modes.data(), out.v.data());
  return out;
}

BoundaryField tangential_derivative(const BoundaryField& h, int order) {
  if (order < 0 || order > 6) throw std::invalid_argument("tangential_derivative: order must be 0..6");
  const Grid& g = *h.grid;
  BoundaryField cur = h;
  for (int k = 0; k < order; ++k) {
    cur = angular_derivative(cur, 1);
    for (int j = 0; j < g.nth(); ++j) cur[j] /= g.boundary_line_element(j);
  }
  return cur;
}

Field interior_tangential(const Field& u) {
  const Grid& g = *u.grid;
  Field out = chart_dtheta(u, 1);
  for (int i = 0; i < g.nr(); ++i) {
    for (int j = 0; j < g.nth(); ++j) {
      // |x_theta| at (s, theta) is s * sqrt(R^2 + R'^2).
      out(i, j) /= g.s(i) * g.boundary_line_element(j);
    }
  }
  return out;
}

double boundary_hs_sq(const BoundaryField& h, double order) {
  auto modes = h.modes();
  const int half = h.grid->nth() / 2;
  double acc = std::pow(1.0, order) * std::norm(modes[0]);
  for (int m = 1; m < half; ++m) {
    acc += 2.0 * std::pow(1.0 + static_cast<double>(m) * m, order) * std::norm(modes[m]);
  }
  acc += std::pow(1.0 + static_cast<double>(half) * half, order) * std::norm(modes[half]);
  return 2.0 * std::numbers::pi * acc;
}

}  // namespace stefan2d
