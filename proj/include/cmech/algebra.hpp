#pragma once

#include <map>
#include <string>
#include <vector>

#include "cmech/expr.hpp"
#include "cmech/registry.hpp"

namespace cmech {

enum class Side { Left, Right };

// Partial derivative. For odd v the factor is moved to the requested end of
// the odd product before removal, and the reordering sign is applied.
Expr derivative(const Expr& f, VarId v, Side side, const VariableRegistry& reg);
inline Expr derivative(const Expr& f, VarId v, const VariableRegistry& reg) {
  return derivative(f, v, Side::Left, reg);
}

/// Graded Poisson bracket over every declared conjugate pair except (t, p0):
///   {A,B} = dA/dq|_r dB/dp|_l - (-1)^(a*b) dB/dq|_r dA/dp|_l
/// summed over pairs, applied separately to the even and odd parts of A and B.
Expr poisson_bracket(const Expr& f, const Expr& g, const VariableRegistry& reg);

// Same bracket with the (Time, TimeMomentum) pair included.
Expr extended_bracket(const Expr& f, const Expr& g, const VariableRegistry& reg);

using Substitution = std::map<VarId, Expr>;

// Simultaneous substitution. Each image must have the parity of the variable it replaces.
Expr substitute(const Expr& f, const Substitution& map, const VariableRegistry& reg);

// Reduction modulo affine constraints ("weak equality"). Each constraint is
// solved for one pivot variable (momentum-like first, then highest id) after
// exact elimination; the pivots are substituted away.
Expr reduce_weak(const Expr& f, const std::vector<Expr>& constraints, const VariableRegistry& reg);

// The pivot substitution used by reduce_weak, exposed for reports and tests.
Substitution weak_pivots(const std::vector<Expr>& constraints, const VariableRegistry& reg);

// Re-expresses f, written against `from`, in the ids of `to` by matching names.
Expr transport(const Expr& f, const VariableRegistry& from, const VariableRegistry& to);

// Primitive integer form: denominators cleared, integer content removed, and the
// sign chosen so that the highest-id momentum-like variable (or, failing that,
// the leading monomial) has a positive coefficient.
Expr normalize_constraint(const Expr& f, const VariableRegistry& reg);

// If f = c*g for a rational c != 0, returns c.
std::optional<Rational> proportionality(const Expr& f, const Expr& g);

// Splits f (linear in the given symbols) into f0 + sum_k coeffs[k]*symbols[k].
// Throws if any symbol appears nonlinearly.
struct LinearSplit {
  Expr rest;
  std::vector<Expr> coefficients;
};
LinearSplit split_linear(const Expr& f, const std::vector<VarId>& symbols);

}  // namespace cmech
