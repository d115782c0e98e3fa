#include "cmech/fcembed.hpp"

#include "cmech/error.hpp"

namespace cmech {

namespace {

// Rows b_i with B Delta B^T = J (J block-diagonal [[0,1],[-1,0]]).
RationalMatrix symplectic_basis(const RationalMatrix& delta) {
  const std::size_t n = delta.rows();
  auto form = [&](const std::vector<Rational>& u, const std::vector<Rational>& w) {
    Rational s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (u[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) s += u[i] * delta(i, j) * w[j];
    }
    return s;
  };
  std::vector<std::vector<Rational>> rest;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Rational> e(n);
    e[i] = 1;
    rest.push_back(e);
  }
  RationalMatrix b(n, n);
  std::size_t row = 0;
  while (!rest.empty()) {
    const auto u = rest.front();
    std::size_t j = 1;
    while (j < rest.size() && form(u, rest[j]) == 0) ++j;
    if (j == rest.size()) throw Error(ErrorCode::NotSecondClass, "constraint bracket matrix is degenerate");
    auto w = rest[j];
    const Rational s = form(u, w);
    for (auto& x : w) x /= s;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(j));
    rest.erase(rest.begin());
    for (auto& x : rest) {
      const Rational xw = form(x, w);
      const Rational xu = form(x, u);
      for (std::size_t i = 0; i < n; ++i) x[i] += -xw * u[i] + xu * w[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      b(row, i) = u[i];
      b(row + 1, i) = w[i];
    }
    row += 2;
  }
  return b;
}

}  // namespace

EmbeddingResult bft_embed(const ConstraintChain& chain) {
  const std::size_t n = chain.constraints.size();
  if (!chain.all_second()) {
    throw Error(ErrorCode::NotSecondClass, "embedding needs an entirely second-class chain");
  }
  if (n % 2 != 0) throw Error(ErrorCode::OddConstraintCount, "odd number of second-class constraints");
  EmbeddingResult emb;
  emb.registry = chain.registry;
  auto& reg = emb.registry;
  emb.phase_space = chain.phase_space;
  emb.h0 = chain.canonical_h;
  emb.total_h = chain.total_h;

  RationalMatrix delta(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    const Expr& c = chain.constraints[a].expr;
    if (c.degree() > 1 || c.parity() != Parity::Even) {
      throw Error(ErrorCode::NonlinearConstraint, "constraint '" + render(c, reg) + "' is not affine");
    }
    emb.original.push_back(c);
    for (std::size_t b = 0; b < n; ++b) {
      const auto d = chain.delta[a][b].as_constant();
      if (!d) throw Error(ErrorCode::NonConstantDelta, "constraint brackets depend on the phase space");
      delta(a, b) = *d;
    }
  }

  const std::size_t k = n / 2;
  std::vector<VarId> phi;
  for (std::size_t i = 0; i < k; ++i) {
    const std::string suffix = (k == 1) ? "" : std::to_string(i + 1);
    const VarId theta = reg.add("theta" + suffix, VarKind::AuxCoordinate);
    const VarId pi = reg.add("pi_theta" + suffix, VarKind::AuxMomentum);
    reg.pair(theta, pi);
    emb.aux_pairs.emplace_back(theta, pi);
    phi.push_back(theta);
    phi.push_back(pi);
  }
  RationalMatrix omega(n, n);
  RationalMatrix d(n, n);
  for (std::size_t i = 0; i < k; ++i) {
    omega(2 * i, 2 * i + 1) = 1;
    omega(2 * i + 1, 2 * i) = -1;
    d(2 * i, 2 * i) = 1;
    d(2 * i + 1, 2 * i + 1) = -1;
  }
  emb.x = *inverse(symplectic_basis(delta)) * d;
  RationalMatrix check = delta + emb.x * omega * emb.x.transpose();
  if (!check.is_zero()) throw Error(ErrorCode::NotSecondClass, "no admissible embedding matrix");

  for (std::size_t a = 0; a < n; ++a) {
    Expr t = emb.original[a];
    for (std::size_t j = 0; j < n; ++j) {
      if (emb.x(a, j) != 0) t += Expr(emb.x(a, j)) * Expr::var(reg, phi[j]);
    }
    emb.fc_constraints.push_back(t);
  }

  // z~ = z + Y.phi with X omega Y = -g, g_a = {Omega_a, z}; exact at first order for affine constraints.
  const RationalMatrix xw_inv = *inverse(emb.x * omega);
  for (VarId z : emb.phase_space) {
    const Expr zv = Expr::var(reg, z);
    std::vector<Rational> g(n);
    for (std::size_t a = 0; a < n; ++a) g[a] = *poisson_bracket(emb.original[a], zv, reg).as_constant();
    Expr image = zv;
    for (std::size_t j = 0; j < n; ++j) {
      Rational y = 0;
      for (std::size_t a = 0; a < n; ++a) y -= xw_inv(j, a) * g[a];
      if (y != 0) image += Expr(y) * Expr::var(reg, phi[j]);
    }
    for (const auto& c : emb.fc_constraints) {
      if (!poisson_bracket(c, image, reg).is_zero()) {
        throw Error(ErrorCode::IterationCap, "gauge-invariant extension of '" + reg[z].name + "' did not terminate");
      }
    }
    emb.tilde_map[z] = image;
  }

  emb.fc_hamiltonian = substitute(emb.h0, emb.tilde_map, reg);
  for (std::size_t i = 0; i < k; ++i) {
    emb.improvement += Expr::var(reg, emb.aux_pairs[i].second) * emb.fc_constraints[2 * i + 1];
  }
  emb.fc_hamiltonian_prime = emb.fc_hamiltonian + emb.improvement;
  return emb;
}

bool GaussReport::ok() const {
  for (const auto& c : checks) {
    if (!c.ok) return false;
  }
  for (const auto& c : limit_checks) {
    if (!c.ok) return false;
  }
  return true;
}

GaussReport check_gauss_algebra(const EmbeddingResult& emb) {
  return check_gauss_algebra(emb, emb.fc_hamiltonian_prime);
}

GaussReport check_gauss_algebra(const EmbeddingResult& emb, const Expr& hamiltonian) {
  GaussReport rep;
  const auto& reg = emb.registry;
  Substitution zero;
  for (const auto& [theta, pi] : emb.aux_pairs) {
    zero[theta] = Expr();
    zero[pi] = Expr();
  }
  for (const auto& c : emb.fc_constraints) rep.brackets.push_back(poisson_bracket(c, hamiltonian, reg));
  for (std::size_t i = 0; 2 * i + 1 < emb.fc_constraints.size(); ++i) {
    const std::string a = std::to_string(2 * i + 1);
    const std::string b = std::to_string(2 * i + 2);
    const Expr& first = rep.brackets[2 * i];
    const Expr& second = rep.brackets[2 * i + 1];
    rep.checks.push_back({"{Omega~" + a + ", H~'} = Omega~" + b, emb.fc_constraints[2 * i + 1], first,
                          first == emb.fc_constraints[2 * i + 1]});
    rep.checks.push_back({"{Omega~" + b + ", H~'} = 0", Expr(), second, second.is_zero()});
  }
  for (std::size_t a = 0; a < emb.fc_constraints.size(); ++a) {
    const Expr limit = substitute(rep.brackets[a], zero, reg);
    const Expr reference = poisson_bracket(emb.original[a], emb.total_h, reg);
    const bool ok = reduce_weak(limit - reference, emb.original, reg).is_zero();
    rep.limit_checks.push_back(
        {"{Omega~" + std::to_string(a + 1) + ", H~'} at zero auxiliaries ~ {Omega" + std::to_string(a + 1) + ", H_T}",
         reference, limit, ok});
  }
  return rep;
}

bool RoundTripReport::ok() const {
  for (const auto& m : momenta) {
    if (!m.ok) return false;
  }
  return primary.ok && secondary.ok && first_class && free_multipliers == 1 && hamiltonian.ok;
}

RoundTripReport roundtrip_lagrangian(const ModelSpec& extended, const EmbeddingResult& emb,
                                     const std::map<std::string, Expr>& expected_momenta) {
  RoundTripReport rep{analyze(extended), {}, {}, {}, {}, false, 0, {}};
  rep.chain = run_chain(rep.legendre);
  const auto& leg = rep.legendre;
  const auto& reg = leg.registry;

  for (const auto& [name, expected] : expected_momenta) {
    IdentityCheck c{name, expected, Expr(), false};
    for (std::size_t i = 0; i < leg.momenta.size(); ++i) {
      if (reg[leg.momenta[i]].name == name) {
        c.actual = leg.momentum_defs[i];
        c.ok = c.actual == expected;
      }
    }
    rep.momenta.push_back(c);
  }

  auto moved = [&](const Expr& e) { return transport(e, emb.registry, reg); };
  const Expr fc1 = moved(emb.fc_constraints.at(0));
  const Expr fc2 = moved(emb.fc_constraints.at(1));
  rep.primary = {"primary = Omega~1", fc1, Expr(), false};
  if (leg.primary_constraints.size() == 1) {
    rep.primary.actual = leg.primary_constraints[0];
    rep.primary.ok = rep.primary.actual == fc1;
  }
  rep.secondary = {"secondary ~ Omega~2", fc2, Expr(), false};
  if (rep.chain.constraints.size() == 2) {
    rep.secondary.actual = rep.chain.constraints[1].expr;
    rep.secondary.ok = proportionality(rep.secondary.actual, fc2).has_value();
  }
  rep.first_class = !rep.chain.constraints.empty();
  for (const auto& c : rep.chain.constraints) rep.first_class = rep.first_class && c.cls == ConstraintClass::First;
  for (const auto& m : rep.chain.multipliers) rep.free_multipliers += m.value ? 0 : 1;

  const Expr target = moved(emb.fc_hamiltonian_prime);
  const Expr diff = reduce_weak(leg.canonical_h - target, rep.chain.exprs(), reg);
  rep.hamiltonian = {"H_c ~ H~'", target, leg.canonical_h, diff.is_zero()};
  return rep;
}

GaugeTable gauge_transformations(const EmbeddingResult& emb) {
  GaugeTable table;
  table.registry = emb.registry;
  auto& reg = table.registry;
  Expr q;
  for (std::size_t a = 0; a < emb.fc_constraints.size(); ++a) {
    table.parameters.push_back(reg.add("eps" + std::to_string(a + 1), VarKind::FormalConstant));
    q += Expr::var(reg, table.parameters.back()) * emb.fc_constraints[a];
  }
  std::vector<VarId> vars;
  const std::size_t half = emb.phase_space.size() / 2;
  for (std::size_t i = 0; i < half; ++i) vars.push_back(emb.phase_space[i]);
  for (const auto& pr : emb.aux_pairs) vars.push_back(pr.first);
  for (std::size_t i = half; i < emb.phase_space.size(); ++i) vars.push_back(emb.phase_space[i]);
  for (const auto& pr : emb.aux_pairs) vars.push_back(pr.second);
  for (VarId v : vars) table.variations.emplace_back(v, poisson_bracket(Expr::var(reg, v), q, reg));
  return table;
}

}  // namespace cmech
