/// Harmonic-gauge change of variables: the map Psi extending e + h N into the
/// reference domain, its inverse differential A, Jacobian J, and the boundary
/// factor Lambda = N . A^T N.
#pragma once

#include <stdexcept>

#include "stefan2d/elliptic.hpp"
#include "stefan2d/field.hpp"
#include "stefan2d/grid.hpp"

namespace stefan2d {

/// Raised when the gauge map stops being usable: the Jacobian or the
/// boundary factor loses positivity somewhere.
class GaugeBreakdown : public std::runtime_error {
 public:
  GaugeBreakdown(const std::string& what, double min_jac, double min_lambda)
      : std::runtime_error(what), min_jacobian(min_jac), min_lambda(min_lambda) {}
  double min_jacobian;
  double min_lambda;
};

struct GaugeState {
  Field psi1, psi2;    // components of the map
  Field psit1, psit2;  // gauge velocity, the extension of h_t N
  // Entries of A = (D Psi)^{-1}; a_ki is row k, column i, so the pullback
  // velocity is v_i = -sum_k a_ki d_k q.
  Field a11, a12, a21, a22;
  Field jac;              // det D Psi
  BoundaryField lambda;   // N . A^T N on Gamma
  BoundaryField atn1, atn2;  // components of A^T N on Gamma
};

/// Holds the Laplace solver so repeated gauge builds reuse its setup.
class GaugeSolver {
 public:
  explicit GaugeSolver(GridPtr g);

  /// Build the gauge state for boundary position h and speed ht.  A previous
  /// state warm-starts the four harmonic solves.  Throws GaugeBreakdown when
  /// J or Lambda fails to stay positive.
  GaugeState make(const BoundaryField& h, const BoundaryField& ht,
                  const GaugeState* warm = nullptr) const;

  const EllipticSolver& laplace() const { return laplace_; }

 private:
  GridPtr grid_;
  EllipticSolver laplace_;
};

/// Single harmonic extension: laplacian u = 0 inside, u = g on Gamma.
Field harmonic_extension(const BoundaryField& g);

/// Unit moving normal A^T N / |A^T N| on Gamma.
std::pair<BoundaryField, BoundaryField> moving_normal(const GaugeState& gs);

}  // namespace stefan2d
