#include "cmech/diracchain.hpp"

#include "cmech/error.hpp"

namespace cmech {

std::string_view to_string(ConstraintClass c) {
  switch (c) {
    case ConstraintClass::First: return "first";
    case ConstraintClass::Second: return "second";
    case ConstraintClass::Undetermined: return "undetermined";
  }
  return "?";
}

std::vector<Expr> ConstraintChain::exprs() const {
  std::vector<Expr> out;
  for (const auto& c : constraints) out.push_back(c.expr);
  return out;
}

bool ConstraintChain::all_second() const {
  for (const auto& c : constraints) {
    if (c.cls != ConstraintClass::Second) return false;
  }
  return true;
}

namespace {

void classify(ConstraintChain& chain) {
  const std::size_t n = chain.constraints.size();
  const auto& reg = chain.registry;
  const auto cons = chain.exprs();
  chain.delta.assign(n, std::vector<Expr>(n));
  std::vector<std::vector<Expr>> weak(n, std::vector<Expr>(n));
  bool constant = true;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      chain.delta[a][b] = poisson_bracket(cons[a], cons[b], reg);
      weak[a][b] = reduce_weak(chain.delta[a][b], cons, reg);
      if (!weak[a][b].is_constant()) constant = false;
    }
  }
  std::vector<std::size_t> nonzero_rows;
  for (std::size_t a = 0; a < n; ++a) {
    bool zero = true;
    for (std::size_t b = 0; b < n; ++b) zero = zero && weak[a][b].is_zero();
    if (zero) {
      chain.constraints[a].cls = ConstraintClass::First;
    } else {
      nonzero_rows.push_back(a);
    }
  }
  if (!constant) {
    for (std::size_t a : nonzero_rows) chain.constraints[a].cls = ConstraintClass::Undetermined;
    return;
  }
  RationalMatrix m(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) m(a, b) = *weak[a][b].as_constant();
  }
  const bool invertible = rank(m.submatrix(nonzero_rows, nonzero_rows)) == nonzero_rows.size();
  for (std::size_t a : nonzero_rows) {
    chain.constraints[a].cls = invertible ? ConstraintClass::Second : ConstraintClass::Undetermined;
  }
  if (chain.all_second() && n > 0) chain.delta_inverse = inverse(m);
}

}  // namespace

ConstraintChain run_chain(const LegendreResult& leg, const ChainOptions& opts) {
  ConstraintChain chain;
  chain.registry = leg.registry;
  chain.canonical_h = leg.canonical_h;
  for (VarId q : leg.coordinates) chain.phase_space.push_back(q);
  for (VarId p : leg.momenta) chain.phase_space.push_back(p);

  const std::size_t k = leg.primary_constraints.size();
  std::vector<VarId> symbols;
  for (std::size_t b = 0; b < k; ++b) {
    const std::string name = (k == 1) ? "v" : "v" + std::to_string(b + 1);
    symbols.push_back(chain.registry.add(name, VarKind::FormalConstant));
    chain.multipliers.push_back({symbols.back(), std::nullopt});
  }
  const auto& reg = chain.registry;
  for (const auto& p : leg.primary_constraints) chain.constraints.push_back({p, p, 0, ConstraintClass::Undetermined});

  // H_T with the fixings made so far substituted; free multipliers stay symbolic.
  auto total_h = [&]() {
    Expr h = chain.canonical_h;
    Substitution fixed;
    for (std::size_t b = 0; b < k; ++b) {
      if (chain.multipliers[b].value) fixed[symbols[b]] = *chain.multipliers[b].value;
    }
    for (std::size_t b = 0; b < k; ++b) {
      const Expr v = fixed.count(symbols[b]) ? fixed[symbols[b]] : Expr::var(reg, symbols[b]);
      h += v * leg.primary_constraints[b];
    }
    return h;
  };
  auto free_symbols = [&]() {
    std::vector<VarId> out;
    for (std::size_t b = 0; b < k; ++b) {
      if (!chain.multipliers[b].value) out.push_back(symbols[b]);
    }
    return out;
  };

  for (std::size_t i = 0; i < chain.constraints.size(); ++i) {
    const Constraint current = chain.constraints[i];
    const Expr condition = poisson_bracket(current.expr, total_h(), reg);
    const auto free = free_symbols();
    const LinearSplit split = split_linear(condition, free);
    const auto cons = chain.exprs();

    std::optional<std::size_t> fixes;
    for (std::size_t j = 0; j < free.size(); ++j) {
      if (!reduce_weak(split.coefficients[j], cons, reg).is_zero()) {
        fixes = j;
        break;
      }
    }
    if (fixes) {
      const auto c = reduce_weak(split.coefficients[*fixes], cons, reg).as_constant();
      if (!c) {
        throw Error(ErrorCode::UnsupportedModel,
                    "multiplier coefficient " + render(split.coefficients[*fixes], reg) +
                        " is not weakly constant");
      }
      Expr rest = split.rest;
      for (std::size_t j = 0; j < free.size(); ++j) {
        if (j != *fixes) rest += split.coefficients[j] * Expr::var(reg, free[j]);
      }
      const Expr value = rest * Expr(Rational(-1 / *c));
      std::size_t b = 0;
      while (symbols[b] != free[*fixes]) ++b;
      for (auto& m : chain.multipliers) {
        if (m.value) m.value = substitute(*m.value, Substitution{{symbols[b], value}}, reg);
      }
      chain.multipliers[b].value = value;
      chain.steps.push_back({i, condition, ChainStep::Outcome::FixedMultiplier, b});
      continue;
    }

    const Expr weak = reduce_weak(split.rest, cons, reg);
    if (weak.is_zero()) {
      chain.steps.push_back({i, condition, ChainStep::Outcome::Stable, i});
      continue;
    }
    if (weak.is_constant()) {
      throw Error(ErrorCode::Inconsistent,
                  "stability of " + render(current.expr, reg) + " requires " + render(weak, reg) + " = 0");
    }
    const int generation = current.generation + 1;
    if (generation >= opts.max_generations) {
      throw Error(ErrorCode::IterationCap,
                  "constraint chain did not close within " + std::to_string(opts.max_generations) +
                      " generations");
    }
    chain.constraints.push_back(
        {normalize_constraint(split.rest, reg), split.rest, generation, ConstraintClass::Undetermined});
    chain.steps.push_back({i, condition, ChainStep::Outcome::NewConstraint, chain.constraints.size() - 1});
  }

  for (const auto& c : chain.constraints) chain.generations = std::max(chain.generations, c.generation + 1);
  chain.total_h = total_h();

  const auto cons = chain.exprs();
  for (const auto& c : chain.constraints) {
    const LinearSplit split = split_linear(poisson_bracket(c.expr, chain.total_h, reg), free_symbols());
    bool stable = reduce_weak(split.rest, cons, reg).is_zero();
    for (const auto& coef : split.coefficients) stable = stable && reduce_weak(coef, cons, reg).is_zero();
    if (!stable) {
      throw Error(ErrorCode::Inconsistent, "constraint " + render(c.expr, reg) + " is not preserved");
    }
  }
  classify(chain);
  return chain;
}

Expr dirac_bracket(const Expr& f, const Expr& g, const ConstraintChain& chain) {
  if (!chain.all_second() || (!chain.constraints.empty() && !chain.delta_inverse)) {
    throw Error(ErrorCode::NotSecondClass, "Dirac bracket needs an entirely second-class chain");
  }
  const auto& reg = chain.registry;
  Expr out = poisson_bracket(f, g, reg);
  const std::size_t n = chain.constraints.size();
  std::vector<Expr> left;
  std::vector<Expr> right;
  for (const auto& c : chain.constraints) {
    left.push_back(poisson_bracket(f, c.expr, reg));
    right.push_back(poisson_bracket(c.expr, g, reg));
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (left[a].is_zero()) continue;
    for (std::size_t b = 0; b < n; ++b) {
      const Rational& w = (*chain.delta_inverse)(a, b);
      if (w != 0) out -= left[a] * Expr(w) * right[b];
    }
  }
  return out;
}

EquationsOfMotion hamilton_eom(const ConstraintChain& chain) {
  EquationsOfMotion out;
  for (VarId z : chain.phase_space) {
    out.emplace_back(z, poisson_bracket(Expr::var(chain.registry, z), chain.total_h, chain.registry));
  }
  return out;
}

EquationsOfMotion dirac_eom(const ConstraintChain& chain) {
  EquationsOfMotion out;
  for (VarId z : chain.phase_space) {
    out.emplace_back(z, dirac_bracket(Expr::var(chain.registry, z), chain.canonical_h, chain));
  }
  return out;
}

}  // namespace cmech
