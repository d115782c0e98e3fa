#pragma once

#include <vector>

#include "cmech/algebra.hpp"
#include "cmech/linalg.hpp"
#include "cmech/modelio.hpp"

namespace cmech {

struct LegendreResult {
  VariableRegistry registry;          // the model registry
  std::vector<VarId> coordinates;     // coordinates then auxiliary coordinates
  std::vector<VarId> momenta;         // conjugates, aligned with coordinates
  std::vector<VarId> velocities;      // aligned with coordinates
  std::vector<Expr> momentum_defs;    // p_i = dL/d(q_i'), in (q, q')
  RationalMatrix hessian;
  std::size_t rank = 0;
  std::vector<std::size_t> solvable;     // coordinate indices with solved velocities
  std::vector<std::size_t> constrained;  // coordinate indices whose momenta are constrained
  // Solved velocities in (q, p) and the undetermined velocities of the
  // constrained coordinates.
  Substitution solved_velocities;
  // p_alpha + H_alpha, aligned with `constrained`; coefficient of p_alpha is 1.
  std::vector<Expr> primary_constraints;
  Expr canonical_h;
};

/// Singular Legendre transform of a velocity-quadratic Lagrangian.
///
/// The invertible block of the Hessian is chosen greedily from the last
/// coordinate backwards, so the lowest-index coordinates are the ones left
/// with constrained momenta. Throws UnsupportedModel for a Hessian that
/// depends on the coordinates.
LegendreResult analyze(const ModelSpec& spec);

}  // namespace cmech
