#include "cmech/legendre.hpp"

#include <algorithm>

#include "cmech/error.hpp"

namespace cmech {

namespace {

bool nonsingular(const RationalMatrix& h, const std::vector<std::size_t>& block) {
  return rank(h.submatrix(block, block)) == block.size();
}

}  // namespace

LegendreResult analyze(const ModelSpec& spec) {
  LegendreResult out;
  out.registry = spec.registry;
  const VariableRegistry& reg = out.registry;
  for (const auto& name : spec.coordinates) out.coordinates.push_back(reg.id(name));
  for (const auto& name : spec.aux) out.coordinates.push_back(reg.id(name));
  const std::size_t n = out.coordinates.size();
  for (VarId q : out.coordinates) {
    out.momenta.push_back(*reg[q].conjugate);
    out.velocities.push_back(*reg.velocity_of(q));
  }

  Substitution zero_velocities;
  for (VarId v : out.velocities) zero_velocities[v] = Expr();

  out.hessian = RationalMatrix(n, n);
  std::vector<Expr> offsets;  // momentum definitions at zero velocity
  for (std::size_t i = 0; i < n; ++i) {
    const Expr p = derivative(spec.lagrangian, out.velocities[i], reg);
    out.momentum_defs.push_back(p);
    offsets.push_back(substitute(p, zero_velocities, reg));
    for (std::size_t j = 0; j < n; ++j) {
      const auto h = derivative(p, out.velocities[j], reg).as_constant();
      if (!h) {
        throw Error(ErrorCode::UnsupportedModel,
                    "velocity Hessian depends on the coordinates (entry " + reg[out.velocities[i]].name +
                        ", " + reg[out.velocities[j]].name + ")");
      }
      out.hessian(i, j) = *h;
    }
  }
  out.rank = rank(out.hessian);

  for (std::size_t k = n; k-- > 0;) {
    auto trial = out.solvable;
    trial.push_back(k);
    if (nonsingular(out.hessian, trial)) out.solvable = trial;
  }
  std::sort(out.solvable.begin(), out.solvable.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::binary_search(out.solvable.begin(), out.solvable.end(), i)) out.constrained.push_back(i);
  }

  // q'_S = H_SS^{-1} (p_S - b_S - H_S,alpha q'_alpha)
  const auto& S = out.solvable;
  const RationalMatrix inv = *inverse(out.hessian.submatrix(S, S));
  std::vector<Expr> rhs;
  for (std::size_t s : S) {
    Expr r = Expr::var(reg, out.momenta[s]) - offsets[s];
    for (std::size_t a : out.constrained) r -= Expr(out.hessian(s, a)) * Expr::var(reg, out.velocities[a]);
    rhs.push_back(r);
  }
  for (std::size_t r = 0; r < S.size(); ++r) {
    Expr v;
    for (std::size_t c = 0; c < S.size(); ++c) v += Expr(inv(r, c)) * rhs[c];
    out.solved_velocities[out.velocities[S[r]]] = v;
  }

  // Null vector w with w_alpha = 1, w_S = -H_SS^{-1} H_S,alpha; constraint sum_i w_i (p_i - b_i).
  Substitution eliminate;  // p_alpha -> -H_alpha
  for (std::size_t a : out.constrained) {
    std::vector<Rational> w(n);
    w[a] = 1;
    for (std::size_t r = 0; r < S.size(); ++r) {
      Rational acc = 0;
      for (std::size_t c = 0; c < S.size(); ++c) acc -= inv(r, c) * out.hessian(S[c], a);
      w[S[r]] = acc;
    }
    Expr omega;
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] != 0) omega += Expr(w[i]) * (Expr::var(reg, out.momenta[i]) - offsets[i]);
    }
    out.primary_constraints.push_back(omega);
    eliminate[out.momenta[a]] = Expr::var(reg, out.momenta[a]) - omega;
  }

  Expr h = -spec.lagrangian;
  for (std::size_t i = 0; i < n; ++i) h += Expr::var(reg, out.momenta[i]) * Expr::var(reg, out.velocities[i]);
  h = substitute(h, out.solved_velocities, reg);
  h = substitute(h, eliminate, reg);
  for (VarId v : out.velocities) {
    if (h.contains(v)) {
      throw Error(ErrorCode::UnsupportedModel,
                  "canonical Hamiltonian retains velocity " + reg[v].name);
    }
  }
  out.canonical_h = h;
  return out;
}

}  // namespace cmech
