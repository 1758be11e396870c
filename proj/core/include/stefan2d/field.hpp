#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <vector>

#include "stefan2d/grid.hpp"

namespace stefan2d {

/// Scalar nodal field on a Grid. Value semantics; the grid is shared.
struct Field {
  GridPtr grid;
  std::vector<double> v;

  Field() = default;
  explicit Field(GridPtr g, double fill = 0.0) : grid(std::move(g)), v(grid->size(), fill) {}

  double& operator()(int i, int j) { return v[grid->index(i, j)]; }
  double operator()(int i, int j) const { return v[grid->index(i, j)]; }

  double max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double min() const { return *std::min_element(v.begin(), v.end()); }
  double max() const { return *std::max_element(v.begin(), v.end()); }
};

/// Sample of a function on the boundary ring Gamma.
struct BoundaryField {
  GridPtr grid;
  std::vector<double> v;

  BoundaryField() = default;
  explicit BoundaryField(GridPtr g, double fill = 0.0) : grid(std::move(g)), v(grid->nth(), fill) {}

  double& operator[](int j) { return v[j]; }
  double operator[](int j) const { return v[j]; }

  double max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double min() const { return *std::min_element(v.begin(), v.end()); }

  std::vector<std::complex<double>> modes() const {
    std::vector<std::complex<double>> c(grid->ring().nmodes());
    grid->ring().to_modes(v.data(), c.data());
    return c;
  }
  static BoundaryField from_modes(const GridPtr& g, const std::vector<std::complex<double>>& c) {
    BoundaryField b(g);
    g->ring().to_ring(c.data(), b.v.data());
    return b;
  }
};

inline Field operator+(Field a, const Field& b) {
  for (size_t k = 0; k < a.v.size(); ++k) a.v[k] += b.v[k];
  return a;
}
inline Field operator-(Field a, const Field& b) {
  for (size_t k = 0; k < a.v.size(); ++k) a.v[k] -= b.v[k];
  return a;
}
inline Field operator*(double c, Field a) {
  for (double& x : a.v) x *= c;
  return a;
}

inline double l2_norm(const Field& u) {
  std::vector<double> sq(u.v.size());
  for (size_t k = 0; k < u.v.size(); ++k) sq[k] = u.v[k] * u.v[k];
  return std::sqrt(u.grid->integrate(sq));
}

inline double inner(const Field& a, const Field& b) {
  std::vector<double> p(a.v.size());
  for (size_t k = 0; k < a.v.size(); ++k) p[k] = a.v[k] * b.v[k];
  return a.grid->integrate(p);
}

inline double l2_norm_boundary(const BoundaryField& h) {
  std::vector<double> sq(h.v.size());
  for (size_t k = 0; k < h.v.size(); ++k) sq[k] = h.v[k] * h.v[k];
  return std::sqrt(h.grid->integrate_boundary(sq));
}

}  // namespace stefan2d
