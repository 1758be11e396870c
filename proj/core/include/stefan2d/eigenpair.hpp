/// First Dirichlet eigenpair of -laplacian, the barrier field with
/// laplacian psi = -1, and the comparison function built from them.
#pragma once

#include "stefan2d/field.hpp"
#include "stefan2d/grid.hpp"

namespace stefan2d {

struct EigenPair {
  double lambda = 0.0;
  Field phi;  // positive in the interior, zero on Gamma, integral of phi^2 is 1
  int iterations = 0;
  double residual = 0.0;  // max norm of (laplacian phi + lambda phi)
};

/// Smallest Dirichlet eigenpair by inverse power iteration on the elliptic
/// solver; stops when the eigenvalue settles to 1e-10 relative.
EigenPair dirichlet_eigenpair(const GridPtr& g);

/// Next eigenpair, from the same iteration deflated against the first.
/// On the disk the second eigenvalue is double, so phi is one member of the
/// eigenspace; used for orthogonality checks.
EigenPair second_eigenpair(const GridPtr& g, const EigenPair& first);

/// Operator Rayleigh quotient -<u, laplacian u> / <u, u> on the discrete
/// operator (no integration by parts, so it reproduces the discrete
/// eigenvalue to solver accuracy).
double rayleigh_quotient(const Field& u);

/// Barrier: laplacian psi = -1 in the domain, psi = 0 on Gamma.
Field barrier_psi(const GridPtr& g);

/// First expansion coefficient of q0 against the normalized eigenfunction.
double c1(const Field& q0, const Field& phi1);

/// kappa1 e^{-(3/2) lambda t} (phi1 - kappa2 psi).
Field comparison_F(double kappa1, double kappa2, double t, double lambda, const Field& phi1,
                   const Field& psi);

/// Largest kappa2 keeping comparison_F positive in the interior at t = 0:
/// the nodewise minimum of phi1/psi over interior nodes.
double kappa2_threshold(const Field& phi1, const Field& psi);

}  // namespace stefan2d
