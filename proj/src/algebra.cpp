#include "cmech/algebra.hpp"

#include <algorithm>

#include "cmech/error.hpp"

namespace cmech {

Expr derivative(const Expr& f, VarId v, Side side, const VariableRegistry& reg) {
  if (!reg.contains(v)) {
    throw Error(ErrorCode::UnregisteredSymbol, "unregistered variable id " + std::to_string(v));
  }
  Expr out;
  const bool odd = reg[v].parity == Parity::Odd;
  for (const auto& [m, c] : f.terms()) {
    if (odd) {
      auto it = std::find(m.odd.begin(), m.odd.end(), v);
      if (it == m.odd.end()) continue;
      const auto j = static_cast<std::size_t>(it - m.odd.begin());
      const std::size_t swaps = (side == Side::Left) ? j : m.odd.size() - 1 - j;
      Monomial r = m;
      r.odd.erase(r.odd.begin() + static_cast<std::ptrdiff_t>(j));
      out.add_term(r, (swaps % 2 == 0) ? c : Rational(-c));
    } else {
      auto it = std::find_if(m.even.begin(), m.even.end(), [v](const auto& f) { return f.first == v; });
      if (it == m.even.end()) continue;
      Monomial r = m;
      auto& slot = r.even[static_cast<std::size_t>(it - m.even.begin())];
      const Rational coef = c * Rational(slot.second);
      if (--slot.second == 0) r.even.erase(r.even.begin() + (it - m.even.begin()));
      out.add_term(r, coef);
    }
  }
  return out;
}

namespace {

void validate_phase_space(const Expr& e, const VariableRegistry& reg, bool extended) {
  for (VarId v : e.variables()) {
    if (!reg.contains(v)) {
      throw Error(ErrorCode::UnregisteredSymbol, "unregistered variable id " + std::to_string(v));
    }
    const Variable& var = reg[v];
    if (var.kind == VarKind::Velocity) {
      throw Error(ErrorCode::VelocityInBracket,
                  "velocity '" + var.name + "' in a phase-space bracket");
    }
    if (var.kind == VarKind::FormalConstant || var.conjugate) continue;
    const bool time_like = var.kind == VarKind::Time || var.kind == VarKind::TimeMomentum;
    if (time_like && !extended) continue;
    throw Error(ErrorCode::MissingConjugate, "'" + var.name + "' has no declared conjugate");
  }
}

Expr bracket(const Expr& f, const Expr& g, const VariableRegistry& reg, bool extended) {
  validate_phase_space(f, reg, extended);
  validate_phase_space(g, reg, extended);
  const auto fv = f.variables();
  const auto gv = g.variables();
  std::vector<std::pair<VarId, VarId>> pairs;
  for (const auto& [q, p] : reg.conjugate_pairs()) {
    if (!extended && reg[q].kind == VarKind::Time) continue;
    const bool in_f = fv.count(q) || fv.count(p);
    const bool in_g = gv.count(q) || gv.count(p);
    if (in_f && in_g) pairs.emplace_back(q, p);
  }
  Expr out;
  if (pairs.empty()) return out;
  for (Parity pa : {Parity::Even, Parity::Odd}) {
    const Expr a = f.part(pa);
    if (a.is_zero()) continue;
    for (Parity pb : {Parity::Even, Parity::Odd}) {
      const Expr b = g.part(pb);
      if (b.is_zero()) continue;
      const bool flip = pa == Parity::Odd && pb == Parity::Odd;
      for (const auto& [q, p] : pairs) {
        out += derivative(a, q, Side::Right, reg) * derivative(b, p, Side::Left, reg);
        const Expr second = derivative(b, q, Side::Right, reg) * derivative(a, p, Side::Left, reg);
        if (flip) {
          out += second;
        } else {
          out -= second;
        }
      }
    }
  }
  return out;
}

}  // namespace

Expr poisson_bracket(const Expr& f, const Expr& g, const VariableRegistry& reg) {
  return bracket(f, g, reg, false);
}

Expr extended_bracket(const Expr& f, const Expr& g, const VariableRegistry& reg) {
  return bracket(f, g, reg, true);
}

Expr substitute(const Expr& f, const Substitution& map, const VariableRegistry& reg) {
  for (const auto& [v, img] : map) {
    if (!reg.contains(v)) {
      throw Error(ErrorCode::UnregisteredSymbol, "unregistered variable id " + std::to_string(v));
    }
    if (img.is_zero()) continue;
    const auto p = img.parity();
    if (!p || *p != reg[v].parity) {
      throw Error(ErrorCode::ParityMismatch,
                  "image of '" + reg[v].name + "' does not have its parity");
    }
  }
  Expr out;
  for (const auto& [m, c] : f.terms()) {
    Expr acc(c);
    Monomial kept;
    for (const auto& [v, e] : m.even) {
      auto it = map.find(v);
      if (it == map.end()) {
        kept.even.emplace_back(v, e);
      } else {
        acc *= it->second.pow(e);
      }
    }
    // Even factors commute, so they can be gathered before the odd product.
    acc *= Expr::term(kept, 1);
    for (VarId v : m.odd) {
      auto it = map.find(v);
      acc *= (it == map.end()) ? Expr::var(reg, v) : it->second;
    }
    out += acc;
  }
  return out;
}

Substitution weak_pivots(const std::vector<Expr>& constraints, const VariableRegistry& reg) {
  struct Row {
    std::map<VarId, Rational> coef;
    Rational constant;
  };
  std::vector<Row> rows;
  for (const Expr& c : constraints) {
    Row row;
    for (const auto& [m, q] : c.terms()) {
      if (m.is_unit()) {
        row.constant = q;
      } else if (m.degree() == 1 && m.odd.empty()) {
        row.coef[m.even.front().first] = q;
      } else {
        throw Error(ErrorCode::NonlinearConstraint,
                    "constraint '" + render(c, reg) + "' is not affine");
      }
    }
    rows.push_back(std::move(row));
  }
  auto preference = [&reg](VarId v) { return std::pair(reg.is_momentum_like(v) ? 1 : 0, v); };
  std::vector<VarId> pivots(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Row& row = rows[i];
    if (row.coef.empty()) {
      if (row.constant == 0) {
        throw Error(ErrorCode::DependentConstraints, "constraint set is linearly dependent");
      }
      throw Error(ErrorCode::InconsistentConstraints, "constraint reduces to a nonzero constant");
    }
    VarId pivot = row.coef.begin()->first;
    for (const auto& [v, q] : row.coef) {
      if (preference(v) > preference(pivot)) pivot = v;
    }
    const Rational inv = 1 / row.coef[pivot];
    for (auto& [v, q] : row.coef) q *= inv;
    row.constant *= inv;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k == i) continue;
      auto it = rows[k].coef.find(pivot);
      if (it == rows[k].coef.end()) continue;
      const Rational f = it->second;
      for (const auto& [v, q] : row.coef) {
        Rational& slot = rows[k].coef[v];
        slot -= f * q;
        if (slot == 0) rows[k].coef.erase(v);
      }
      rows[k].constant -= f * row.constant;
    }
    pivots[i] = pivot;
  }
  Substitution map;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Expr image(-rows[i].constant);
    for (const auto& [v, q] : rows[i].coef) {
      if (v != pivots[i]) image -= Expr(q) * Expr::var(reg, v);
    }
    map[pivots[i]] = image;
  }
  return map;
}

Expr reduce_weak(const Expr& f, const std::vector<Expr>& constraints, const VariableRegistry& reg) {
  if (constraints.empty()) return f;
  return substitute(f, weak_pivots(constraints, reg), reg);
}

Expr transport(const Expr& f, const VariableRegistry& from, const VariableRegistry& to) {
  Expr out;
  for (const auto& [m, c] : f.terms()) {
    Expr acc(c);
    for (const auto& [v, e] : m.even) acc *= Expr::var(to, from[v].name).pow(e);
    for (VarId v : m.odd) acc *= Expr::var(to, from[v].name);
    out += acc;
  }
  return out;
}

Expr normalize_constraint(const Expr& f, const VariableRegistry& reg) {
  if (f.is_zero()) return f;
  mpz_class den = 1;
  for (const auto& [m, c] : f.terms()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
  mpz_class content = 0;
  for (const auto& [m, c] : f.terms()) {
    mpz_class num = c.get_num() * (den / c.get_den());
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), num.get_mpz_t());
  }
  Rational scale(den, content);
  scale.canonicalize();
  Expr out = f * Expr(scale);

  // Sign reference: leading monomial among those holding the highest-id momentum.
  std::optional<VarId> top;
  for (VarId v : out.variables()) {
    if (reg.contains(v) && reg.is_momentum_like(v)) top = v;
  }
  Rational ref = out.terms().rbegin()->second;
  if (top) {
    for (auto it = out.terms().rbegin(); it != out.terms().rend(); ++it) {
      if (it->first.contains(*top)) {
        ref = it->second;
        break;
      }
    }
  }
  if (ref < 0) out = -out;
  return out;
}

std::optional<Rational> proportionality(const Expr& f, const Expr& g) {
  if (f.is_zero() || g.is_zero()) return std::nullopt;
  const auto& [mf, cf] = *f.terms().rbegin();
  const Rational cg = g.coefficient(mf);
  if (cg == 0) return std::nullopt;
  const Rational ratio = cf / cg;
  if (f == g * Expr(ratio)) return ratio;
  return std::nullopt;
}

LinearSplit split_linear(const Expr& f, const std::vector<VarId>& symbols) {
  LinearSplit out;
  out.coefficients.resize(symbols.size());
  for (const auto& [m, c] : f.terms()) {
    std::optional<std::size_t> which;
    for (std::size_t k = 0; k < symbols.size(); ++k) {
      const auto e = m.exponent(symbols[k]);
      if (e == 0) continue;
      if (e > 1 || which) {
        throw Error(ErrorCode::NonlinearConstraint, "expression is not linear in the multipliers");
      }
      which = k;
    }
    if (!which) {
      out.rest.add_term(m, c);
      continue;
    }
    Monomial r = m;
    const VarId s = symbols[*which];
    std::erase_if(r.even, [s](const auto& f) { return f.first == s; });
    out.coefficients[*which].add_term(r, c);
  }
  return out;
}

}  // namespace cmech
