#pragma once

#include "stefan2d/field.hpp"

namespace stefan2d {

// Chart derivatives (s = reference radius, theta = angle). Radial derivatives
// are width-9 diameter stencils, angular derivatives are spectral.
Field chart_ds(const Field& u);
Field chart_dss(const Field& u);
Field chart_dtheta(const Field& u, int order = 1);
/// Mixed chart derivative, computed as d/dtheta of d/ds (that order is the
/// one that stays smooth across the pole on non-circular domains).
Field chart_dstheta(const Field& u);

/// Cartesian derivative of multi-index (ax, ay), total order 0..2.
/// Orders above 2 per call are rejected (compose calls instead).
Field differentiate(const Field& u, int ax, int ay);

struct Gradient {
  Field x, y;
};
Gradient gradient(const Field& u);

struct Hessian {
  Field xx, xy, yy;
};
Hessian hessian(const Field& u);

/// Trace of a field on Gamma (the last ring lies exactly on the boundary).
BoundaryField boundary_trace(const Field& u);

/// Outward normal derivative on Gamma, via one-sided high-order radial
/// stencils combined with the boundary gradient frame.
BoundaryField normal_derivative(const Field& u);

/// Gradient evaluated on the boundary ring only.
struct BoundaryGradient {
  BoundaryField x, y;
};
BoundaryGradient boundary_gradient(const Field& u);

/// d/dtheta of a boundary sample, spectral, order 0..6.
BoundaryField angular_derivative(const BoundaryField& h, int order);

/// Arclength-normalized tangential derivative on Gamma of the given order
/// (on the unit circle this coincides with angular_derivative).
BoundaryField tangential_derivative(const BoundaryField& h, int order);

/// Interior tangential derivative: one application of (1/|x_theta|) d/dtheta
/// along the coordinate rings. Meaningful on the mu-collar; iterate for
/// higher order.
Field interior_tangential(const Field& u);

/// Sobolev norm squared of a boundary sample: sum over modes of
/// (1 + m^2)^order |h_m|^2 weights, discrete-Parseval normalized. Supports
/// fractional orders.
double boundary_hs_sq(const BoundaryField& h, double order);

}  // namespace stefan2d
