/// Acceptance suite: nine checks against pinned quantitative targets, shared
/// around one extended trajectory of the coupled solver.
#pragma once

#include <string>
#include <vector>

#include "stefan2d/stefan.hpp"

namespace stefan2d {

struct CriterionResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // smallest slack across the criterion's clauses
  std::string detail;
};

/// Runs the full acceptance battery on the given configuration (the default
/// SimConfig is the contract grid).  The coupled run is extended past t_end
/// to one unit beyond T_K so the late-time sign and settling checks have a
/// nonvacuous window; rows at t <= t_end coincide bitwise with a plain run
/// of the same configuration.
std::vector<CriterionResult> run_acceptance(const SimConfig& cfg);

}  // namespace stefan2d
