#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cmech/legendre.hpp"

namespace cmech {

enum class ConstraintClass { First, Second, Undetermined };

std::string_view to_string(ConstraintClass c);

struct Constraint {
  Expr expr;  // normalized form (primaries keep their Legendre form)
  Expr raw;   // the stabilization expression it came from
  int generation = 0;
  ConstraintClass cls = ConstraintClass::Undetermined;
};

struct Multiplier {
  VarId symbol;
  std::optional<Expr> value;  // nullopt: free
};

// One stabilization step, kept for reports.
struct ChainStep {
  enum class Outcome { Stable, NewConstraint, FixedMultiplier };
  std::size_t constraint;  // index of the constraint being stabilized
  Expr condition;          // {Omega, H0} + sum_b v_b {Omega, Omega_b}
  Outcome outcome;
  std::size_t target;      // new constraint index or multiplier index
};

struct ChainOptions {
  int max_generations = 16;
};

struct ConstraintChain {
  VariableRegistry registry;  // Legendre registry plus multiplier symbols
  std::vector<VarId> phase_space;  // coordinates then momenta
  Expr canonical_h;
  std::vector<Constraint> constraints;
  std::vector<std::vector<Expr>> delta;  // strong {Omega_a, Omega_b}
  std::optional<RationalMatrix> delta_inverse;
  std::vector<Multiplier> multipliers;  // aligned with the primary constraints
  Expr total_h;
  std::vector<ChainStep> steps;
  int generations = 0;

  std::vector<Expr> exprs() const;
  bool all_second() const;
};

/// Dirac consistency algorithm. Multiplier symbols are even formal constants
/// named v (one primary) or v1, v2, ...
ConstraintChain run_chain(const LegendreResult& leg, const ChainOptions& opts = {});

/// {f,g} - {f,Omega_a} Delta^ab {Omega_b,g}, strong form. Throws NotSecondClass
/// unless every constraint is second class.
Expr dirac_bracket(const Expr& f, const Expr& g, const ConstraintChain& chain);

using EquationsOfMotion = std::vector<std::pair<VarId, Expr>>;

// z' = {z, H_T} over the phase space, free multipliers left symbolic.
EquationsOfMotion hamilton_eom(const ConstraintChain& chain);

// z' = {z, H0}_D. Agrees with hamilton_eom on the constraint surface.
EquationsOfMotion dirac_eom(const ConstraintChain& chain);

}  // namespace cmech
