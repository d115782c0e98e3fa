#include "cmech/hjscheme.hpp"

#include <set>

#include "cmech/error.hpp"

namespace cmech {

std::vector<Expr> HJSystem::constraints() const {
  std::vector<Expr> out;
  for (std::size_t i = 1; i < hprimes.size(); ++i) out.push_back(hprimes[i].expr);
  return out;
}

const HJParameter& HJSystem::parameter(VarId coordinate) const {
  for (const auto& p : parameters) {
    if (p.coordinate == coordinate) return p;
  }
  throw Error(ErrorCode::NoFixing, "'" + registry[coordinate].name + "' is not an HJ parameter");
}

HJSystem build_hj_system(const LegendreResult& leg) {
  HJSystem sys;
  sys.registry = leg.registry;
  auto& reg = sys.registry;
  sys.time = reg.add("t", VarKind::Time);
  sys.time_momentum = reg.add("p0", VarKind::TimeMomentum);
  reg.pair(sys.time, sys.time_momentum);

  sys.hprimes.push_back({"H'0", Expr::var(reg, sys.time_momentum) + leg.canonical_h, false});
  for (std::size_t k = 0; k < leg.constrained.size(); ++k) {
    const std::size_t a = leg.constrained[k];
    const VarId q = leg.coordinates[a];
    const std::string& name = reg[q].name;
    HJParameter par{q, reg.add("dot_" + name, VarKind::FormalConstant),
                    reg.add("ddot_" + name, VarKind::FormalConstant), sys.hprimes.size()};
    sys.parameters.push_back(par);
    sys.hprimes.push_back({"H'" + std::to_string(a + 1), leg.primary_constraints[k], false});
  }

  std::vector<const Expr*> generators{&sys.hprimes[0].expr};
  for (const auto& p : sys.parameters) generators.push_back(&sys.hprimes[p.entry].expr);
  auto add_rows = [&](VarId q, VarId p) {
    HJEomRow dq{q, {}};
    HJEomRow dp{p, {}};
    for (const Expr* h : generators) {
      dq.coefficients.push_back(derivative(*h, p, reg));
      dp.coefficients.push_back(-derivative(*h, q, reg));
    }
    return std::pair(dq, dp);
  };
  std::vector<HJEomRow> positions;
  std::vector<HJEomRow> momenta;
  auto [dt, dp0] = add_rows(sys.time, sys.time_momentum);
  positions.push_back(dt);
  momenta.push_back(dp0);
  for (std::size_t i = 0; i < leg.coordinates.size(); ++i) {
    auto [dq, dp] = add_rows(leg.coordinates[i], leg.momenta[i]);
    positions.push_back(dq);
    momenta.push_back(dp);
  }
  sys.eom_table = positions;
  sys.eom_table.insert(sys.eom_table.end(), momenta.begin(), momenta.end());
  return sys;
}

namespace {

// dE/dt along the parameters, with unfixed parameter velocities left symbolic.
Expr total_derivative(const Expr& e, const HJSystem& sys, bool use_fixings) {
  const auto& reg = sys.registry;
  Expr out = extended_bracket(e, sys.hprimes[0].expr, reg);
  for (const auto& p : sys.parameters) {
    const Expr b = extended_bracket(e, sys.hprimes[p.entry].expr, reg);
    if (b.is_zero()) continue;
    auto it = sys.velocity_fixings.find(p.coordinate);
    const bool fixed = use_fixings && it != sys.velocity_fixings.end();
    out += b * (fixed ? it->second : Expr::var(reg, p.velocity));
  }
  return out;
}

std::vector<VarId> free_velocities(const HJSystem& sys) {
  std::vector<VarId> out;
  for (const auto& p : sys.parameters) {
    if (!sys.velocity_fixings.count(p.coordinate)) out.push_back(p.velocity);
  }
  return out;
}

// Label of an existing constraint entry proportional to e, with the factor.
std::optional<std::string> proportional_entry(const Expr& e, const HJSystem& sys) {
  for (std::size_t i = 1; i < sys.hprimes.size(); ++i) {
    if (auto c = proportionality(e, sys.hprimes[i].expr)) {
      return render(Expr(*c), sys.registry) + " times " + sys.hprimes[i].label;
    }
  }
  return std::nullopt;
}

int next_label(const HJSystem& sys) {
  int best = 0;
  for (const auto& h : sys.hprimes) best = std::max(best, std::stoi(h.label.substr(2)));
  return best + 1;
}

}  // namespace

HJSystem integrability_closure(HJSystem sys, int max_rounds) {
  const auto& reg = sys.registry;
  for (int round = 1;; ++round) {
    if (round > max_rounds) {
      throw Error(ErrorCode::IterationCap,
                  "integrability conditions did not close within " + std::to_string(max_rounds) + " rounds");
    }
    sys.rounds = round;
    bool changed = false;
    std::size_t i = 1;
    while (true) {
      // Constraint entries in order, including ones appended this round; H'0 last.
      const std::size_t idx = (i < sys.hprimes.size()) ? i : 0;
      const HJEntry entry = sys.hprimes[idx];
      const Expr symbolic = total_derivative(entry.expr, sys, false);
      const Expr effective = total_derivative(entry.expr, sys, true);
      const auto free = free_velocities(sys);
      const LinearSplit split = split_linear(effective, free);
      const auto cons = sys.constraints();
      HJBranch branch{round, entry.label, symbolic, ""};

      std::optional<std::size_t> live;
      for (std::size_t j = 0; j < free.size(); ++j) {
        if (!reduce_weak(split.coefficients[j], cons, reg).is_zero()) {
          live = j;
          break;
        }
      }
      if (live) {
        const Expr coef = split.coefficients[*live];
        const auto c = reduce_weak(coef, cons, reg).as_constant();
        const VarId v = free[*live];
        std::size_t k = 0;
        while (sys.parameters[k].velocity != v) ++k;
        if (c) {
          Expr rest = split.rest;
          for (std::size_t j = 0; j < free.size(); ++j) {
            if (j != *live) rest += split.coefficients[j] * Expr::var(reg, free[j]);
          }
          const Expr value = rest * Expr(Rational(-1 / *c));
          for (auto& [q, f] : sys.velocity_fixings) f = substitute(f, Substitution{{v, value}}, reg);
          sys.velocity_fixings[sys.parameters[k].coordinate] = value;
          branch.outcome = "fixes " + reg[v].name + " = " + render(value, reg);
        } else {
          const std::string label = "H'" + std::to_string(next_label(sys));
          const Expr derived = normalize_constraint(coef, reg);
          sys.hprimes.push_back({label, derived, true});
          sys.derived_constraints.push_back(derived);
          branch.outcome = "coefficient of " + reg[v].name + " gives new constraint " + label;
        }
        changed = true;
      } else {
        const Expr weak = reduce_weak(split.rest, cons, reg);
        if (weak.is_zero()) {
          branch.outcome = "vanishes weakly";
          for (const auto& p : sys.parameters) {
            const Expr b = extended_bracket(entry.expr, sys.hprimes[p.entry].expr, reg);
            if (b.is_zero() || !reduce_weak(b, cons, reg).is_zero()) continue;
            if (auto dup = proportional_entry(b, sys)) {
              branch.outcome += "; coefficient of " + reg[p.velocity].name + " is " + *dup +
                                " (already present)";
            }
          }
        } else if (weak.is_constant()) {
          throw Error(ErrorCode::Inconsistent,
                      "integrability of " + entry.label + " requires " + render(weak, reg) + " = 0");
        } else {
          const std::string label = "H'" + std::to_string(next_label(sys));
          const Expr derived = normalize_constraint(split.rest, reg);
          sys.hprimes.push_back({label, derived, true});
          sys.derived_constraints.push_back(derived);
          branch.outcome = "new constraint " + label;
          changed = true;
        }
      }
      sys.log.push_back(branch);
      if (idx == 0) break;
      ++i;
    }
    if (!changed) break;
  }
  sys.closed = true;
  return sys;
}

std::vector<Expr> integrability_residuals(const HJSystem& sys) {
  std::vector<Expr> out;
  const auto cons = sys.constraints();
  const auto free = free_velocities(sys);
  for (const auto& h : sys.hprimes) {
    const LinearSplit split = split_linear(total_derivative(h.expr, sys, true), free);
    Expr r = reduce_weak(split.rest, cons, sys.registry);
    for (std::size_t j = 0; j < free.size(); ++j) {
      r += reduce_weak(split.coefficients[j], cons, sys.registry) * Expr::var(sys.registry, free[j]);
    }
    out.push_back(r);
  }
  return out;
}

ParameterOde derive_parameter_ode(const HJSystem& sys, VarId coordinate) {
  const auto& reg = sys.registry;
  const HJParameter& par = sys.parameter(coordinate);
  auto it = sys.velocity_fixings.find(coordinate);
  if (it == sys.velocity_fixings.end()) {
    throw Error(ErrorCode::NoFixing, "no velocity fixing for '" + reg[coordinate].name + "'");
  }
  const auto cons = sys.constraints();
  const Expr v = reduce_weak(it->second, cons, reg);
  ParameterOde out{coordinate, Expr(), false, reduce_weak(total_derivative(it->second, sys, true), cons, reg)};

  // rate = sum_k c_k v^k, lowest degree first.
  for (unsigned degree = 0; degree <= 2 && !out.autonomous; ++degree) {
    std::vector<Expr> powers;
    for (unsigned k = 0; k <= degree; ++k) powers.push_back(v.pow(k));
    std::set<Monomial, MonomialLess> basis;
    for (const auto& [m, c] : out.rate.terms()) basis.insert(m);
    for (const auto& p : powers) {
      for (const auto& [m, c] : p.terms()) basis.insert(m);
    }
    RationalMatrix a(basis.size(), powers.size());
    std::vector<Rational> b;
    std::size_t row = 0;
    for (const auto& m : basis) {
      for (std::size_t k = 0; k < powers.size(); ++k) a(row, k) = powers[k].coefficient(m);
      b.push_back(out.rate.coefficient(m));
      ++row;
    }
    auto sol = solve(a, b);
    if (!sol) continue;
    out.autonomous = true;
    out.ode = Expr::var(reg, par.acceleration);
    for (std::size_t k = 0; k < sol->size(); ++k) {
      out.ode -= Expr((*sol)[k]) * Expr::var(reg, par.velocity).pow(static_cast<unsigned>(k));
    }
  }
  if (!out.autonomous) out.ode = Expr::var(reg, par.acceleration) - out.rate;
  return out;
}

EquivalenceReport compare_with_dirac(const HJSystem& sys, const ConstraintChain& chain) {
  EquivalenceReport rep;
  const auto& reg = sys.registry;
  auto moved = [&](const Expr& e) -> std::optional<Expr> {
    try {
      return transport(e, reg, chain.registry);
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  std::vector<bool> used(chain.constraints.size(), false);
  rep.constraints_match = sys.hprimes.size() - 1 == chain.constraints.size();
  for (std::size_t i = 1; i < sys.hprimes.size(); ++i) {
    const auto e = moved(sys.hprimes[i].expr);
    bool found = false;
    for (std::size_t a = 0; e && a < chain.constraints.size() && !found; ++a) {
      if (!used[a] && chain.constraints[a].expr == *e) {
        used[a] = found = true;
        rep.matches.push_back(sys.hprimes[i].label + " = Omega" + std::to_string(a + 1));
      }
    }
    if (!found) {
      rep.constraints_match = false;
      rep.mismatches.push_back(sys.hprimes[i].label + " = " + render(sys.hprimes[i].expr, reg) +
                               " has no counterpart in the Dirac chain");
    }
  }
  for (std::size_t a = 0; a < used.size(); ++a) {
    if (!used[a]) {
      rep.mismatches.push_back("Omega" + std::to_string(a + 1) + " = " +
                               render(chain.constraints[a].expr, chain.registry) +
                               " has no counterpart among the H'");
    }
  }

  rep.fixings_match = sys.parameters.size() == chain.multipliers.size();
  for (std::size_t b = 0; b < chain.multipliers.size() && b < sys.parameters.size(); ++b) {
    const auto& m = chain.multipliers[b];
    const auto& par = sys.parameters[b];
    const std::string pair = reg[par.velocity].name + " ~ " + chain.registry[m.symbol].name;
    auto it = sys.velocity_fixings.find(par.coordinate);
    const bool hj_fixed = it != sys.velocity_fixings.end();
    if (!hj_fixed && !m.value) {
      rep.matches.push_back(pair + " (both free)");
      continue;
    }
    const auto e = hj_fixed ? moved(it->second) : std::nullopt;
    if (hj_fixed && m.value && e && *e == *m.value) {
      rep.matches.push_back(pair + " = " + render(*m.value, chain.registry));
      continue;
    }
    rep.fixings_match = false;
    rep.mismatches.push_back(pair + ": " + (hj_fixed ? render(it->second, reg) : std::string("free")) +
                             " vs " + (m.value ? render(*m.value, chain.registry) : std::string("free")));
  }
  return rep;
}

Expr rewrite_constraint_in_velocities(const Expr& expr, const VariableRegistry& from,
                                      const LegendreResult& leg) {
  Substitution momenta;
  for (std::size_t i = 0; i < leg.momenta.size(); ++i) momenta[leg.momenta[i]] = leg.momentum_defs[i];
  return substitute(transport(expr, from, leg.registry), momenta, leg.registry);
}

}  // namespace cmech
