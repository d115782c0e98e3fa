#include "cmech/dynamics.hpp"

#include <cmath>
#include <cstdio>

#include "cmech/error.hpp"

namespace cmech {

CompiledPolynomials::CompiledPolynomials(const std::vector<Expr>& polys, const std::vector<VarId>& variables,
                                         const VariableRegistry& reg) {
  std::map<VarId, std::size_t> slot;
  for (std::size_t i = 0; i < variables.size(); ++i) slot[variables[i]] = i;
  for (const Expr& p : polys) {
    std::vector<Term> row;
    for (const auto& [m, c] : p.terms()) {
      if (!m.odd.empty()) throw Error(ErrorCode::ParityMismatch, "odd variable in a numerical expression");
      Term t{c.get_d(), {}};
      for (const auto& [v, e] : m.even) {
        auto it = slot.find(v);
        if (it == slot.end()) {
          throw Error(ErrorCode::UnregisteredSymbol, "unresolved symbol '" + reg[v].name + "' in a vector field");
        }
        t.factors.emplace_back(it->second, e);
      }
      row.push_back(std::move(t));
    }
    rows_.push_back(std::move(row));
  }
}

void CompiledPolynomials::eval(const std::vector<double>& x, std::vector<double>& out) const {
  out.assign(rows_.size(), 0.0);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    double acc = 0;
    for (const auto& t : rows_[r]) {
      double v = t.coef;
      for (const auto& [i, e] : t.factors) {
        for (unsigned k = 0; k < e; ++k) v *= x[i];
      }
      acc += v;
    }
    out[r] = acc;
  }
}

std::vector<double> CompiledPolynomials::eval(const std::vector<double>& x) const {
  std::vector<double> out;
  eval(x, out);
  return out;
}

VectorField compile_rhs(const EquationsOfMotion& eom, const VariableRegistry& reg) {
  VectorField f;
  std::vector<VarId> vars;
  std::vector<Expr> rows;
  for (const auto& [v, e] : eom) {
    vars.push_back(v);
    f.names.push_back(reg[v].name);
    rows.push_back(e);
  }
  f.rhs = CompiledPolynomials(rows, vars, reg);
  return f;
}

CompiledPolynomials compile_constraints(const ConstraintChain& chain, const VectorField& field) {
  std::vector<VarId> vars;
  for (const auto& name : field.names) vars.push_back(chain.registry.id(name));
  return CompiledPolynomials(chain.exprs(), vars, chain.registry);
}

Trajectory integrate_rk4(const VectorField& field, const State& s0, double t1, double dt,
                         const CompiledPolynomials& constraints,
                         const std::vector<std::string>& constraint_names) {
  if (!(dt > 0) || !std::isfinite(dt)) throw Error(ErrorCode::Usage, "step size must be positive");
  if (!(t1 > s0.t) || !std::isfinite(t1)) throw Error(ErrorCode::Usage, "final time must exceed the initial time");
  if (s0.values.size() != field.names.size()) throw Error(ErrorCode::Usage, "initial state has the wrong size");

  Trajectory traj;
  traj.names = field.names;
  traj.residual_names = constraint_names;
  const std::size_t n = s0.values.size();
  auto record = [&](double t, const std::vector<double>& x) {
    for (double v : x) {
      if (!std::isfinite(v)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", t);
        throw Error(ErrorCode::NonFinite, std::string("non-finite state at t = ") + buf);
      }
    }
    traj.grid.push_back(t);
    traj.states.push_back(x);
    traj.residuals.push_back(constraints.size() ? constraints.eval(x) : std::vector<double>{});
  };

  const double span = t1 - s0.t;
  auto steps = static_cast<std::size_t>(std::ceil(span / dt * (1 - 1e-12)));
  if (steps == 0) steps = 1;
  std::vector<double> x = s0.values;
  std::vector<double> k1, k2, k3, k4, tmp(n);
  record(s0.t, x);
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t = traj.grid.back();
    const double next = (s == steps) ? t1 : s0.t + static_cast<double>(s) * dt;
    const double h = next - t;
    field.rhs.eval(x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    field.rhs.eval(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    field.rhs.eval(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    field.rhs.eval(tmp, k4);
    for (std::size_t i = 0; i < n; ++i) x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    record(next, x);
  }
  return traj;
}

State analytic_solution(const SolutionConstants& c, double t) {
  const double ep = std::exp(2 * t);
  const double em = std::exp(-2 * t);
  return {t,
          {c.a * ep - t + c.c1, 2 * c.a * ep + t + c.c2, c.a / 2 * ep + c.b * em + 0.5, 2 * c.a * ep - 1,
           -t + c.c1, 1.5 * c.a * ep + c.b * em + 0.5}};
}

SolutionConstants fit_constants(const State& s0, double tol) {
  if (s0.t != 0) throw Error(ErrorCode::Usage, "constants are fitted at t = 0");
  if (s0.values.size() != 6) throw Error(ErrorCode::Usage, "expected q1, q2, q3, p1, p2, p3");
  const auto& v = s0.values;
  SolutionConstants c;
  c.a = (v[3] + 1) / 2;
  c.c1 = v[4];
  c.b = v[5] - 1.5 * c.a - 0.5;
  c.c2 = v[1] - 2 * c.a;
  auto check = [&](const char* relation, double residual) {
    if (std::fabs(residual) > tol) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "state is off the solution family: %s fails by %.3g", relation, residual);
      throw Error(ErrorCode::OffSolutionFamily, buf);
    }
  };
  check("q1 = A + C1", v[0] - (c.a + c.c1));
  check("q3 = A/2 + B + 1/2", v[2] - (c.a / 2 + c.b + 0.5));
  return c;
}

SolutionFamily solution_family() {
  SolutionFamily f;
  auto& reg = f.registry;
  for (const char* name : {"t", "Ep", "Em", "A", "B", "C1", "C2"}) reg.add(name, VarKind::FormalConstant);
  auto v = [&](const char* n) { return Expr::var(reg, n); };
  const Expr half(Rational(1, 2));
  f.values["q1"] = v("A") * v("Ep") - v("t") + v("C1");
  f.values["q2"] = Expr(2) * v("A") * v("Ep") + v("t") + v("C2");
  f.values["q3"] = half * v("A") * v("Ep") + v("B") * v("Em") + half;
  f.values["p1"] = Expr(2) * v("A") * v("Ep") - Expr(1);
  f.values["p2"] = -v("t") + v("C1");
  f.values["p3"] = Expr(Rational(3, 2)) * v("A") * v("Ep") + v("B") * v("Em") + half;
  return f;
}

Expr SolutionFamily::reduce(const Expr& e) const {
  const VarId ep = registry.id("Ep");
  const VarId em = registry.id("Em");
  Expr out;
  for (const auto& [m, c] : e.terms()) {
    const unsigned k = std::min(m.exponent(ep), m.exponent(em));
    if (k == 0) {
      out.add_term(m, c);
      continue;
    }
    Monomial r;
    for (const auto& [v, x] : m.even) {
      const unsigned left = (v == ep || v == em) ? x - k : x;
      if (left > 0) r.even.emplace_back(v, left);
    }
    r.odd = m.odd;
    out.add_term(r, c);
  }
  return out;
}

Expr SolutionFamily::time_derivative(const Expr& e) const {
  const VarId ep = registry.id("Ep");
  const VarId em = registry.id("Em");
  Expr out = derivative(e, registry.id("t"), registry);
  out += Expr(2) * Expr::var(registry, ep) * derivative(e, ep, registry);
  out -= Expr(2) * Expr::var(registry, em) * derivative(e, em, registry);
  return reduce(out);
}

Expr SolutionFamily::evaluate(const Expr& e, const VariableRegistry& from) const {
  Expr out;
  for (const auto& [m, c] : e.terms()) {
    if (!m.odd.empty()) throw Error(ErrorCode::ParityMismatch, "odd variable in a trajectory expression");
    Expr acc(c);
    for (const auto& [v, x] : m.even) {
      auto it = values.find(from[v].name);
      if (it == values.end()) {
        throw Error(ErrorCode::UnregisteredSymbol, "'" + from[v].name + "' is not part of the solution family");
      }
      acc *= it->second.pow(x);
    }
    out += acc;
  }
  return reduce(out);
}

std::vector<std::pair<std::string, Expr>> flow_residuals(const SolutionFamily& family,
                                                         const EquationsOfMotion& eom,
                                                         const VariableRegistry& reg) {
  std::vector<std::pair<std::string, Expr>> out;
  for (const auto& [z, rhs] : eom) {
    const std::string& name = reg[z].name;
    const Expr lhs = family.time_derivative(family.values.at(name));
    out.emplace_back(name, family.reduce(lhs - family.evaluate(rhs, reg)));
  }
  return out;
}

}  // namespace cmech
