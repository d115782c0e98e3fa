#include "cmech/brst.hpp"

#include <set>

#include "cmech/error.hpp"

namespace cmech {

namespace {

// Constant V with f = sum_b V_b g_b, if one exists.
std::optional<std::vector<Rational>> constant_combination(const Expr& f, const std::vector<Expr>& g) {
  std::set<Monomial, MonomialLess> basis;
  for (const auto& [m, c] : f.terms()) basis.insert(m);
  for (const auto& e : g) {
    for (const auto& [m, c] : e.terms()) basis.insert(m);
  }
  RationalMatrix a(basis.size(), g.size());
  std::vector<Rational> rhs;
  std::size_t row = 0;
  for (const auto& m : basis) {
    for (std::size_t k = 0; k < g.size(); ++k) a(row, k) = g[k].coefficient(m);
    rhs.push_back(f.coefficient(m));
    ++row;
  }
  if (basis.empty()) return std::vector<Rational>(g.size());
  return solve(a, rhs);
}

}  // namespace

BRSTComplex build_complex(const EmbeddingResult& emb, const std::vector<Expr>& gauge) {
  BRSTComplex cx;
  cx.registry = emb.registry;
  cx.constraints = emb.fc_constraints;
  cx.gauge = gauge;
  auto& reg = cx.registry;
  const std::size_t m = cx.constraints.size();
  if (!gauge.empty() && gauge.size() != m) {
    throw Error(ErrorCode::InvalidRegistry, "one gauge condition per constraint is required");
  }
  for (const auto& chi : gauge) {
    if (chi.parity() != Parity::Even) {
      throw Error(ErrorCode::ParityMismatch, "gauge condition '" + render(chi, reg) + "' is not even");
    }
  }

  cx.lambda = reg.add("lambda", VarKind::FormalConstant, Parity::Odd, -1);
  auto family = [&](const char* stem, VarKind kind, Parity parity, int ghost) {
    std::vector<VarId> out;
    for (std::size_t a = 0; a < m; ++a) out.push_back(reg.add(stem + std::to_string(a + 1), kind, parity, ghost));
    return out;
  };
  cx.c = family("C", VarKind::GhostC, Parity::Odd, 1);
  cx.pbar = family("Pbar", VarKind::GhostPbar, Parity::Odd, -1);
  cx.p = family("P", VarKind::GhostP, Parity::Odd, 1);
  cx.cbar = family("Cbar", VarKind::GhostCbar, Parity::Odd, -1);
  cx.n = family("N", VarKind::LagrangeN, Parity::Even, 0);
  cx.b = family("B", VarKind::LagrangeB, Parity::Even, 0);
  for (std::size_t a = 0; a < m; ++a) {
    reg.pair(cx.c[a], cx.pbar[a]);
    reg.pair(cx.p[a], cx.cbar[a]);
    reg.pair(cx.n[a], cx.b[a]);
  }
  auto var = [&](VarId v) { return Expr::var(reg, v); };

  for (std::size_t a = 0; a < m; ++a) {
    cx.q += var(cx.c[a]) * cx.constraints[a] + var(cx.p[a]) * var(cx.b[a]);
    if (!gauge.empty()) cx.psi += var(cx.cbar[a]) * gauge[a] + var(cx.pbar[a]) * var(cx.n[a]);
  }

  cx.structure = RationalMatrix(m, m);
  cx.hm = emb.fc_hamiltonian_prime;
  for (std::size_t a = 0; a < m; ++a) {
    const Expr g = poisson_bracket(cx.constraints[a], emb.fc_hamiltonian_prime, reg);
    auto v = constant_combination(g, cx.constraints);
    if (!v) {
      throw Error(ErrorCode::UnsupportedModel,
                  "{Omega~" + std::to_string(a + 1) + ", H~'} is not a constant combination of the constraints");
    }
    for (std::size_t b = 0; b < m; ++b) {
      cx.structure(a, b) = (*v)[b];
      if ((*v)[b] != 0) cx.hm += Expr((*v)[b]) * var(cx.c[a]) * var(cx.pbar[b]);
    }
  }
  cx.htot = cx.hm - poisson_bracket(cx.q, cx.psi, reg);
  return cx;
}

std::vector<BRSTIdentity> check_brst_identities(const BRSTComplex& cx) {
  const auto& reg = cx.registry;
  return {
      {"{Q,Q} = 0", poisson_bracket(cx.q, cx.q, reg)},
      {"{Q,H_m} = 0", poisson_bracket(cx.q, cx.hm, reg)},
      {"{{Psi,Q},Q} = 0", poisson_bracket(poisson_bracket(cx.psi, cx.q, reg), cx.q, reg)},
  };
}

Expr brst_transform(const BRSTComplex& cx, const Expr& f) {
  return -(Expr::var(cx.registry, cx.lambda) * poisson_bracket(cx.q, f, cx.registry));
}

bool has_ghost_number(const Expr& e, const VariableRegistry& reg, int n) {
  for (const auto& [m, c] : e.terms()) {
    if (ghost_number(m, reg) != n) return false;
  }
  return true;
}

VariableRegistry ghost_frame(const BRSTComplex& cx, const LegendreResult& leg) {
  VariableRegistry frame = leg.registry;
  for (const auto* family : {&cx.c, &cx.pbar, &cx.p, &cx.cbar, &cx.n, &cx.b}) {
    for (VarId v : *family) {
      const Variable& var = cx.registry[v];
      if (!frame.find(var.name)) frame.add(var.name, var.kind, var.parity, var.ghost_number);
    }
  }
  return frame;
}

Expr ghost_extended_constraint(const BRSTComplex& cx, const EmbeddingResult& emb,
                               const VariableRegistry& frame, const GhostRelations& rel, std::size_t index) {
  const Expr omega = transport(emb.fc_constraints.at(index), cx.registry, frame);
  for (VarId v : omega.variables()) {
    if (frame.is_momentum_like(v) && !rel.momenta.count(v)) {
      throw Error(ErrorCode::MissingRelation, "no velocity relation for '" + frame[v].name + "'");
    }
  }
  return substitute(substitute(omega, rel.momenta, frame), rel.choices, frame);
}

}  // namespace cmech
