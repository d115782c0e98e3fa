#pragma once

#include <map>
#include <string>
#include <vector>

#include "cmech/diracchain.hpp"

namespace cmech {

// Polynomials in a fixed list of variables with double coefficients.
class CompiledPolynomials {
 public:
  CompiledPolynomials() = default;
  // Throws UnregisteredSymbol for a variable outside `variables`, ParityMismatch for odd ones.
  CompiledPolynomials(const std::vector<Expr>& polys, const std::vector<VarId>& variables,
                      const VariableRegistry& reg);

  std::size_t size() const { return rows_.size(); }
  void eval(const std::vector<double>& x, std::vector<double>& out) const;
  std::vector<double> eval(const std::vector<double>& x) const;

 private:
  struct Term {
    double coef;
    std::vector<std::pair<std::size_t, unsigned>> factors;
  };
  std::vector<std::vector<Term>> rows_;
};

struct VectorField {
  std::vector<std::string> names;  // state variables, in EOM order
  CompiledPolynomials rhs;
};

VectorField compile_rhs(const EquationsOfMotion& eom, const VariableRegistry& reg);

struct State {
  double t = 0;
  std::vector<double> values;  // aligned with the field's names
};

struct Trajectory {
  std::vector<std::string> names;
  std::vector<std::string> residual_names;
  std::vector<double> grid;
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> residuals;
};

/// Classical fixed-step RK4 from s0.t to t1; the last step is shortened to
/// land on t1. Constraint residuals are sampled at every grid point.
Trajectory integrate_rk4(const VectorField& field, const State& s0, double t1, double dt,
                         const CompiledPolynomials& constraints = {},
                         const std::vector<std::string>& constraint_names = {});

// Constraints of a chain compiled over the field's variables.
CompiledPolynomials compile_constraints(const ConstraintChain& chain, const VectorField& field);

// The closed-form solution family of the nonholonomic model.
struct SolutionConstants {
  double a = 0;
  double b = 0;
  double c1 = 0;
  double c2 = 0;
};

// Values in the order q1, q2, q3, p1, p2, p3.
State analytic_solution(const SolutionConstants& c, double t);

// Inverts analytic_solution at t = 0. Throws OffSolutionFamily naming the
// violated relation when q1 = A + C1 or q3 = A/2 + B + 1/2 fails by more than tol.
SolutionConstants fit_constants(const State& s0, double tol = 1e-10);

/// The solution family with e^{2t}, e^{-2t} as formal generators Ep, Em:
/// d/dt acts as d_t + 2 Ep d_Ep - 2 Em d_Em and Ep*Em reduces to 1.
struct SolutionFamily {
  VariableRegistry registry;  // t, Ep, Em, A, B, C1, C2
  std::map<std::string, Expr> values;

  Expr reduce(const Expr& e) const;
  Expr time_derivative(const Expr& e) const;
  // Substitutes the family into an expression over `from`, matching by name.
  Expr evaluate(const Expr& e, const VariableRegistry& from) const;
};

SolutionFamily solution_family();

// d/dt z(t) - F(z(t)) for every EOM row, reduced; all zero when the family solves the flow.
std::vector<std::pair<std::string, Expr>> flow_residuals(const SolutionFamily& family,
                                                         const EquationsOfMotion& eom,
                                                         const VariableRegistry& reg);

}  // namespace cmech
