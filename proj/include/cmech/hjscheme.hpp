#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cmech/diracchain.hpp"
#include "cmech/legendre.hpp"

namespace cmech {

struct HJEntry {
  std::string label;  // "H'0", "H'2", ...
  Expr expr;
  bool derived = false;
};

// A constrained coordinate promoted to an evolution parameter.
struct HJParameter {
  VarId coordinate;
  VarId velocity;      // formal symbol dot_<name>
  VarId acceleration;  // formal symbol ddot_<name>
  std::size_t entry;   // index of its H' in hprimes
};

// Coefficients of dz = sum_beta f_beta dt_beta, beta over (t, parameters...).
struct HJEomRow {
  VarId variable;
  std::vector<Expr> coefficients;
};

struct HJBranch {
  int round;
  std::string entry;
  Expr condition;  // with parameter velocities left symbolic
  std::string outcome;
};

struct HJSystem {
  VariableRegistry registry;  // Legendre registry plus t, p0 and the formal velocity symbols
  VarId time = 0;
  VarId time_momentum = 0;
  std::vector<HJEntry> hprimes;  // H'0 first
  std::vector<HJParameter> parameters;
  std::vector<HJEomRow> eom_table;
  std::vector<Expr> derived_constraints;
  std::map<VarId, Expr> velocity_fixings;  // keyed by parameter coordinate
  std::vector<HJBranch> log;
  int rounds = 0;
  bool closed = false;

  std::vector<Expr> constraints() const;  // every H' except H'0
  const HJParameter& parameter(VarId coordinate) const;
};

HJSystem build_hj_system(const LegendreResult& leg);

/// Demands dH'/dt = {H', H'0} + sum_beta {H', H'_beta} dq_beta/dt = 0 for every
/// H' (H'0 last in each round) until a round adds nothing. Coefficients of a
/// parameter velocity that are constant fix that velocity; any other
/// non-vanishing piece becomes a derived constraint.
HJSystem integrability_closure(HJSystem sys, int max_rounds = 16);

// The conditions above evaluated with the fixings, reduced weakly; all zero once closed.
std::vector<Expr> integrability_residuals(const HJSystem& sys);

struct ParameterOde {
  VarId parameter;
  Expr ode;  // in ddot_<q>, dot_<q> when autonomous
  bool autonomous = false;
  Expr rate;  // d/dt of the fixing, reduced weakly
};

ParameterOde derive_parameter_ode(const HJSystem& sys, VarId coordinate);

struct EquivalenceReport {
  bool constraints_match = false;
  bool fixings_match = false;
  std::vector<std::string> matches;
  std::vector<std::string> mismatches;
  bool full_match() const { return constraints_match && fixings_match; }
};

EquivalenceReport compare_with_dirac(const HJSystem& sys, const ConstraintChain& chain);

// Replaces every momentum by its definition in (q, q'). `from` is the registry
// expr is written against; the result uses leg.registry.
Expr rewrite_constraint_in_velocities(const Expr& expr, const VariableRegistry& from,
                                      const LegendreResult& leg);

}  // namespace cmech
