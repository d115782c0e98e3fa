#include "cmech/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "cmech/bundled_models.hpp"
#include "cmech/error.hpp"

namespace cmech {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Everything the criteria and the printed-result scan look at, computed once.
struct Context {
  ModelSpec model;
  ModelSpec extended;
  LegendreResult leg;
  LegendreResult ext_leg;
  ConstraintChain chain;
  EquationsOfMotion eom;
  HJSystem hj;
  EmbeddingResult emb;
  BRSTComplex cx;
  VariableRegistry frame;
  double legendre_seconds = 0;
};

Context build_context() {
  Context c;
  const auto t0 = Clock::now();
  c.model = parse_model(bundled::kNhcs);
  c.leg = analyze(c.model);
  c.legendre_seconds = seconds_since(t0);
  c.extended = parse_model(bundled::kNhcsExtended);
  c.ext_leg = analyze(c.extended);
  c.chain = run_chain(c.leg);
  c.eom = hamilton_eom(c.chain);
  c.hj = integrability_closure(build_hj_system(c.leg));
  c.emb = bft_embed(c.chain);
  c.cx = build_complex(c.emb, c.emb.original);
  c.frame = ghost_frame(c.cx, c.ext_leg);
  return c;
}

Expr var(const VariableRegistry& reg, const char* name) { return Expr::var(reg, name); }

// Collects failures of one criterion as readable fragments.
struct Tally {
  std::vector<std::string> failed;
  void expect(bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  }
  void equal(const Expr& got, const Expr& want, const VariableRegistry& reg, const std::string& what) {
    if (got != want) failed.push_back(what + ": got " + render(got, reg) + ", want " + render(want, reg));
  }
  CriterionResult result(int n, std::string title, std::string ok_detail) const {
    CriterionResult r{n, std::move(title), failed.empty(), {}, 0};
    if (failed.empty()) {
      r.detail = std::move(ok_detail);
    } else {
      for (const auto& f : failed) r.detail += (r.detail.empty() ? "" : "; ") + f;
    }
    return r;
  }
};

CriterionResult criterion_legendre(const Context& c) {
  const auto& reg = c.leg.registry;
  auto P = [&](const char* s) { return parse_expr(s, reg); };
  Tally t;
  const std::vector<Expr> momenta = {P("d(q1)"), P("1/2*(d(q3) - d(q2)) + q1 + q3"), P("1/2*(d(q2) - d(q3))")};
  for (std::size_t i = 0; i < momenta.size(); ++i) {
    t.equal(c.leg.momentum_defs.at(i), momenta[i], reg, "p" + std::to_string(i + 1));
  }
  t.expect(c.leg.rank == 2, "Hessian rank " + std::to_string(c.leg.rank));
  t.expect(c.leg.primary_constraints.size() == 1, "expected one primary constraint");
  if (c.leg.primary_constraints.size() == 1) {
    t.equal(c.leg.primary_constraints[0], P("p2 + p3 - q1 - q3"), reg, "primary");
  }
  t.equal(c.leg.canonical_h, P("1/2*(p1^2 - 2*p3^2) + q1 + q2 + q3^2"), reg, "H0");
  t.expect(c.legendre_seconds < 1.0, "runtime " + fmt("%.3f s", c.legendre_seconds));
  return t.result(1, "Legendre reproduction", "momenta, rank 2, primary and H0 exact in " + fmt("%.4f s", c.legendre_seconds));
}

CriterionResult criterion_chain(const Context& c) {
  const auto& ch = c.chain;
  const auto& reg = ch.registry;
  auto P = [&](const char* s) { return parse_expr(s, reg); };
  Tally t;
  t.expect(ch.constraints.size() == 2, "constraint count " + std::to_string(ch.constraints.size()));
  t.expect(ch.generations == 2, "generations " + std::to_string(ch.generations));
  if (ch.constraints.size() == 2 && ch.steps.size() >= 2) {
    t.equal(ch.constraints[1].expr, P("2*p3 - p1 - 2*q3 - 1"), reg, "Omega2");
    t.expect(ch.steps[0].outcome == ChainStep::Outcome::NewConstraint && ch.steps[0].target == 1,
             "first stabilization step does not produce Omega2");
    t.expect(ch.steps[1].outcome == ChainStep::Outcome::FixedMultiplier, "second step does not fix v");
    t.equal(ch.steps[1].condition, P("4*p3 - 4*q3 + 1 - v"), reg, "stability of Omega2");
    t.expect(ch.multipliers.size() == 1 && ch.multipliers[0].value, "v not fixed");
    if (ch.multipliers.size() == 1 && ch.multipliers[0].value) {
      t.equal(*ch.multipliers[0].value, P("4*p3 - 4*q3 + 1"), reg, "v");
    }
    for (const auto& k : ch.constraints) t.expect(k.cls == ConstraintClass::Second, "constraint not second class");
    t.equal(ch.delta[0][1], Expr(1), reg, "Delta12");
    t.equal(ch.delta[1][0], Expr(-1), reg, "Delta21");
  } else {
    t.expect(false, "chain shape");
  }
  return t.result(2, "Dirac chain", "Omega2 in one step, v in the next, 2 generations, second class, Delta12 = 1");
}

int kd(std::size_t i, std::size_t j) { return i == j ? 1 : 0; }

// Kronecker-delta formulas for the reference Dirac brackets, 1-based indices.
Rational reference_qp(std::size_t i, std::size_t j) {
  return kd(i, j) - kd(i, 1) * (kd(j, 1) + kd(j, 3)) - 2 * kd(i, 2) * kd(j, 3) + 2 * kd(i, 3) * kd(j, 1);
}
Rational reference_qq(std::size_t i, std::size_t j) {
  return -2 * (kd(i, 2) * kd(j, 3) - kd(i, 3) * kd(j, 2)) - (kd(i, 1) * kd(j, 2) - kd(i, 2) * kd(j, 1)) +
         (kd(i, 3) * kd(j, 1) - kd(i, 1) * kd(j, 3));
}
Rational reference_pp(std::size_t i, std::size_t j) {
  return -2 * (kd(i, 1) * kd(j, 3) - kd(i, 3) * kd(j, 1));
}

CriterionResult criterion_dirac_brackets(const Context& c) {
  const auto& reg = c.chain.registry;
  Tally t;
  int count = 0;
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = 0; b < 6; ++b) {
      const bool aq = a < 3;
      const bool bq = b < 3;
      const std::size_t i = a % 3 + 1;
      const std::size_t j = b % 3 + 1;
      Rational want;
      if (aq && bq) want = reference_qq(i, j);
      else if (!aq && !bq) want = reference_pp(i, j);
      else if (aq) want = reference_qp(i, j);
      else want = -reference_qp(j, i);
      const std::string u = (aq ? "q" : "p") + std::to_string(i);
      const std::string v = (bq ? "q" : "p") + std::to_string(j);
      const Expr got = dirac_bracket(Expr::var(reg, u), Expr::var(reg, v), c.chain);
      t.equal(got, Expr(want), reg, "{" + u + "," + v + "}_D");
      ++count;
    }
  }
  return t.result(3, "Dirac brackets", std::to_string(count) + " brackets match the delta formulas");
}

CriterionResult criterion_hj(const Context& c) {
  const auto& sys = c.hj;
  const auto& reg = sys.registry;
  auto P = [&](const char* s) { return parse_expr(s, reg); };
  Tally t;
  const auto h3 = std::find_if(sys.hprimes.begin(), sys.hprimes.end(), [](const HJEntry& e) { return e.label == "H'3"; });
  t.expect(h3 != sys.hprimes.end() && h3->derived, "H'3 not derived");
  if (h3 != sys.hprimes.end()) t.equal(h3->expr, P("2*p3 - p1 - 2*q3 - 1"), reg, "H'3");
  t.expect(sys.closed, "closure did not terminate");
  const VarId q2 = reg.id("q2");
  const auto fix = sys.velocity_fixings.find(q2);
  t.expect(fix != sys.velocity_fixings.end(), "dot_q2 not fixed");
  if (fix != sys.velocity_fixings.end()) t.equal(fix->second, P("4*p3 - 4*q3 + 1"), reg, "dot_q2");
  try {
    const auto ode = derive_parameter_ode(sys, q2);
    t.expect(ode.autonomous, "ODE not autonomous");
    t.equal(ode.ode, P("ddot_q2 - 2*dot_q2 + 2"), reg, "ODE");
  } catch (const Error& e) {
    t.expect(false, e.what());
  }
  const auto eq = compare_with_dirac(sys, c.chain);
  t.expect(eq.full_match(), "HJ and Dirac analyses differ");
  return t.result(4, "HJ closure", "H'3, dot_q2 = 4p3-4q3+1, ddot_q2 - 2 dot_q2 + 2 = 0, full Dirac match");
}

CriterionResult criterion_embedding(const Context& c) {
  const auto& emb = c.emb;
  const auto& reg = emb.registry;
  auto P = [&](const char* s) { return parse_expr(s, reg); };
  Tally t;
  t.expect(emb.fc_constraints.size() == 2, "constraint count");
  if (emb.fc_constraints.size() == 2) {
    t.equal(emb.fc_constraints[0], P("p2 + p3 - q1 - q3 + theta"), reg, "Omega~1");
    t.equal(emb.fc_constraints[1], P("2*p3 - p1 - 2*q3 - 1 - pi_theta"), reg, "Omega~2");
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t b = 0; b < 2; ++b) {
        t.equal(poisson_bracket(emb.fc_constraints[a], emb.fc_constraints[b], reg), Expr(0), reg,
                "{Omega~" + std::to_string(a + 1) + ",Omega~" + std::to_string(b + 1) + "}");
      }
    }
    t.equal(poisson_bracket(emb.fc_constraints[0], emb.fc_hamiltonian_prime, reg), emb.fc_constraints[1], reg,
            "{Omega~1,H~'}");
    t.equal(poisson_bracket(emb.fc_constraints[1], emb.fc_hamiltonian_prime, reg), Expr(0), reg, "{Omega~2,H~'}");
    t.equal(emb.fc_hamiltonian_prime, emb.fc_hamiltonian + var(reg, "pi_theta") * emb.fc_constraints[1], reg,
            "H~' = H~ + pi Omega~2");
  }
  const std::vector<std::pair<const char*, const char*>> tilde = {
      {"q1", "q1 - theta"},          {"q2", "q2 + pi_theta"}, {"q3", "q3 + pi_theta + 2*theta"},
      {"p1", "p1 + pi_theta"},       {"p2", "p2"},            {"p3", "p3 + pi_theta + 2*theta"}};
  for (const auto& [z, want] : tilde) t.equal(emb.tilde_map.at(reg.id(z)), P(want), reg, std::string("~") + z);
  const Expr h0 = transport(c.leg.canonical_h, c.leg.registry, reg);
  t.equal(emb.fc_hamiltonian,
          h0 + P("(-4*p3 + 4*q3 - 1)*theta + (p1 - 2*p3 + 2*q3 + 1)*pi_theta + 1/2*pi_theta^2"), reg, "H~");
  t.equal(emb.fc_hamiltonian, substitute(h0, emb.tilde_map, reg), reg, "H~ = H0(tilde)");
  return t.result(5, "BFT embedding", "Omega~, tilde map and H~ exact; strong involution; Gauss algebra closes");
}

std::map<std::string, Expr> extended_momenta(const Context& c) {
  const auto& reg = c.extended.registry;
  auto P = [&](const char* s) { return parse_expr(s, reg); };
  return {{"p1", P("d(q1) + 2*theta")},
          {"p2", P("1/2*(d(q3) - d(q2)) + q1 + q3 - theta")},
          {"p3", P("1/2*(d(q2) - d(q3))")},
          {"pi_theta", P("-d(theta) - 2*theta")}};
}

CriterionResult criterion_roundtrip(const Context& c) {
  const auto rt = roundtrip_lagrangian(c.extended, c.emb, extended_momenta(c));
  const auto& reg = rt.legendre.registry;
  Tally t;
  for (const auto& m : rt.momenta) t.expect(m.ok, m.label + ": got " + render(m.actual, reg));
  t.expect(rt.primary.ok, "primary: got " + render(rt.primary.actual, reg));
  t.expect(rt.secondary.ok, "secondary: got " + render(rt.secondary.actual, rt.chain.registry));
  t.expect(rt.first_class, "chain not first class");
  t.expect(rt.free_multipliers == 1, "free multipliers " + std::to_string(rt.free_multipliers));
  t.expect(rt.hamiltonian.ok, "canonical Hamiltonian not weakly H~'");
  return t.result(6, "Round trip", "momenta, primary Omega~1, first-class chain with one free multiplier, H ~ H~'");
}

// Momentum relations from the gauge-fixed effective Lagrangian. The auxiliary
// momentum comes from its stationarity condition theta' - N2 + pi = 0.
GhostRelations consistent_relations(const Context& c) {
  const auto& f = c.frame;
  auto P = [&](const char* s) { return parse_expr(s, f); };
  return {{{f.id("p1"), P("d(q1) - N2 - B2")},
           {f.id("p2"), P("1/2*(d(q3) - d(q2)) + q1 + q3 + theta + N2 + B2")},
           {f.id("p3"), P("1/2*(d(q2) - d(q3)) - 2*theta - N2 - B2")},
           {f.id("pi_theta"), P("N2 - d(theta)")}},
          {{f.id("N2"), P("-B2 - 2*theta")}}};
}

GhostRelations printed_relations(const Context& c) {
  const auto& f = c.frame;
  GhostRelations rel = consistent_relations(c);
  rel.momenta[f.id("pi_theta")] = parse_expr("-d(theta) - N2", f);
  rel.choices[f.id("N2")] = parse_expr("-B2 + 2*theta", f);
  return rel;
}

const char* kGhostConstraint = "-d(q1) + d(q2) - d(q3) - 2*q3 - 1 + d(theta) + B2";

std::vector<std::pair<const char*, const char*>> brst_rows() {
  return {{"q1", "-lambda*C2"},   {"q2", "lambda*C1"},     {"q3", "lambda*(C1 + 2*C2)"},
          {"theta", "-lambda*C2"}, {"Cbar1", "-lambda*B1"}, {"Cbar2", "-lambda*B2"},
          {"C1", "0"},             {"C2", "0"},             {"B1", "0"},
          {"B2", "0"}};
}

CriterionResult criterion_brst(const Context& c) {
  const auto& cx = c.cx;
  const auto& reg = cx.registry;
  Tally t;
  for (const auto& id : check_brst_identities(cx)) t.expect(id.ok(), id.label + ": remainder " + render(id.remainder, reg));
  for (const auto& [name, want] : brst_rows()) {
    t.equal(brst_transform(cx, var(reg, name)), parse_expr(want, reg), reg, std::string("delta_B ") + name);
  }
  t.expect(has_ghost_number(cx.q, reg, 1), "Q ghost number");
  t.expect(has_ghost_number(cx.psi, reg, -1), "Psi ghost number");
  t.expect(has_ghost_number(cx.htot, reg, 0), "H_tot ghost number");
  t.equal(ghost_extended_constraint(cx, c.emb, c.frame, consistent_relations(c)),
          parse_expr(kGhostConstraint, c.frame), c.frame, "ghost-extended Omega~2");
  return t.result(7, "BRST",
                  "{Q,Q}, {Q,H_m}, {{Psi,Q},Q} vanish; delta_B table matches; ghost-extended Omega~2 reproduced "
                  "(pi_theta from stationarity, N2 = -B2 - 2 theta)");
}

CriterionResult criterion_numerics(const Context& c, const VerifyOptions& opts) {
  const auto t0 = Clock::now();
  Tally t;
  const VectorField field = compile_rhs(c.eom, c.chain.registry);
  const CompiledPolynomials cons = compile_constraints(c.chain, field);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  double worst_rel = 0;
  double worst_res = 0;
  for (int k = 0; k < opts.rk_tuples; ++k) {
    const SolutionConstants sc{coef(rng), coef(rng), coef(rng), coef(rng)};
    const auto traj = integrate_rk4(field, analytic_solution(sc, 0), 1.0, 1e-3, cons, {"res1", "res2"});
    for (std::size_t s = 0; s < traj.grid.size(); ++s) {
      const State exact = analytic_solution(sc, traj.grid[s]);
      for (std::size_t i = 0; i < 6; ++i) {
        const double err = std::fabs(traj.states[s][i] - exact.values[i]);
        worst_rel = std::max(worst_rel, err / std::max(1.0, std::fabs(exact.values[i])));
      }
      for (double r : traj.residuals[s]) worst_res = std::max(worst_res, std::fabs(r));
    }
  }
  // Order check on a fixed tuple, at step sizes well above rounding noise.
  const SolutionConstants sc{1.0, 0.5, 0.25, -0.5};
  auto final_error = [&](double dt) {
    const auto traj = integrate_rk4(field, analytic_solution(sc, 0), 1.0, dt);
    const State exact = analytic_solution(sc, 1.0);
    double e = 0;
    for (std::size_t i = 0; i < 6; ++i) e = std::max(e, std::fabs(traj.states.back()[i] - exact.values[i]));
    return e;
  };
  const double ratio = final_error(0.02) / final_error(0.01);
  const double elapsed = seconds_since(t0);
  t.expect(worst_rel <= 1e-6, "relative error " + fmt("%.3g", worst_rel));
  t.expect(worst_res <= 1e-8, "constraint residual " + fmt("%.3g", worst_res));
  t.expect(ratio >= 12 && ratio <= 20, "convergence ratio " + fmt("%.3g", ratio));
  t.expect(elapsed < 5.0, "runtime " + fmt("%.3f s", elapsed));
  return t.result(8, "Numerics",
                  "max rel error " + fmt("%.2e", worst_rel) + ", max residual " + fmt("%.2e", worst_res) +
                      ", halving ratio " + fmt("%.2f", ratio) + ", " + fmt("%.3f s", elapsed));
}

CriterionResult criterion_properties(const VerifyOptions& opts) {
  Tally t;
  const auto stats = bracket_properties(opts.seed, opts.bracket_triples);
  t.expect(stats.triples >= 200, "only " + std::to_string(stats.triples) + " triples");
  t.expect(stats.failures == 0, std::to_string(stats.failures) + " failures, first: " + stats.first_failure);
  const auto corpus = model_corpus(opts.seed, opts.corpus_size);
  std::string first;
  const int bad = roundtrip_failures(corpus, &first);
  t.expect(corpus.size() >= 20, "corpus of " + std::to_string(corpus.size()));
  t.expect(bad == 0, std::to_string(bad) + " round-trip failures, first: " + first);
  return t.result(9, "Property suites",
                  std::to_string(stats.checks) + " identities on " + std::to_string(stats.triples) +
                      " triples; " + std::to_string(corpus.size()) + " models round-trip");
}

// --- printed results ---------------------------------------------------------

struct Scanner {
  std::vector<PrintedCheck> checks;
  void add(const std::string& where, const Expr& printed, const Expr& computed, const VariableRegistry& reg) {
    checks.push_back({where, render(printed, reg), render(computed, reg), printed == computed});
  }
};

std::vector<PrintedCheck> scan_printed(const Context& c) {
  Scanner s;
  {
    const auto& reg = c.leg.registry;
    auto P = [&](const char* e) { return parse_expr(e, reg); };
    s.add("momentum p1", P("d(q1)"), c.leg.momentum_defs[0], reg);
    s.add("momentum p2", P("1/2*(d(q3) - d(q2)) + q1 + q3"), c.leg.momentum_defs[1], reg);
    s.add("momentum p3", P("1/2*(d(q2) - d(q3))"), c.leg.momentum_defs[2], reg);
    s.add("primary constraint", P("p2 + p3 - q1 - q3"), c.leg.primary_constraints.at(0), reg);
    s.add("canonical Hamiltonian", P("1/2*(p1^2 - 2*p3^2) + q1 + q2 + q3^2"), c.leg.canonical_h, reg);
  }
  {
    const auto& sys = c.hj;
    const auto& reg = sys.registry;
    auto P = [&](const char* e) { return parse_expr(e, reg); };
    const Expr h0 = sys.hprimes.at(0).expr;
    const Expr h2 = sys.hprimes.at(1).expr;
    const Expr h3 = P("2*p3 - p1 - 2*q3 - 1");
    s.add("HJ Hamiltonian H'0", P("p0 + 1/2*(p1^2 - 2*p3^2) + q1 + q2 + q3^2"), h0, reg);
    s.add("HJ Hamiltonian H'2", P("p2 + p3 - q1 - q3"), h2, reg);
    const std::vector<std::pair<const char*, std::pair<const char*, const char*>>> table = {
        {"t", {"1", "0"}},   {"q1", {"p1", "0"}},      {"q2", {"0", "1"}},  {"q3", {"-2*p3", "1"}},
        {"p0", {"0", "0"}},  {"p1", {"-1", "1"}},      {"p2", {"-1", "0"}}, {"p3", {"-2*q3", "1"}}};
    for (const auto& [name, coefs] : table) {
      const auto row = std::find_if(sys.eom_table.begin(), sys.eom_table.end(),
                                    [&](const HJEomRow& r) { return reg[r.variable].name == name; });
      if (row == sys.eom_table.end()) continue;
      s.add(std::string("HJ differential of ") + name + ", dt part", P(coefs.first), row->coefficients.at(0), reg);
      s.add(std::string("HJ differential of ") + name + ", dq2 part", P(coefs.second), row->coefficients.at(1), reg);
    }
    s.add("{H'0,H'2} = -H'3", -h3, extended_bracket(h0, h2, reg), reg);
    s.add("{H'2,H'0} = H'3", h3, extended_bracket(h2, h0, reg), reg);
    const auto h3e = std::find_if(sys.hprimes.begin(), sys.hprimes.end(), [](const HJEntry& e) { return e.label == "H'3"; });
    s.add("HJ constraint H'3", h3, h3e == sys.hprimes.end() ? Expr() : h3e->expr, reg);
    const VarId q2 = reg.id("q2");
    const Expr cond = extended_bracket(h3, h0, reg) + extended_bracket(h3, h2, reg) * var(reg, "dot_q2");
    s.add("integrability of H'3", P("4*p3 - 4*q3 + 1 - dot_q2"), cond, reg);
    const auto fix = sys.velocity_fixings.find(q2);
    s.add("dot_q2 fixing", P("4*p3 - 4*q3 + 1"), fix == sys.velocity_fixings.end() ? Expr() : fix->second, reg);
    Expr ode;
    try {
      ode = derive_parameter_ode(sys, q2).ode;
    } catch (const Error&) {
    }
    s.add("q2 equation", P("ddot_q2 - 2*dot_q2 + 2"), ode, reg);
    s.add("H'3 in velocities", parse_expr("-d(q1) + d(q2) - d(q3) - 2*q3 - 1", c.leg.registry),
          rewrite_constraint_in_velocities(h3, reg, c.leg), c.leg.registry);
  }
  {
    const auto& ch = c.chain;
    const auto& reg = ch.registry;
    auto P = [&](const char* e) { return parse_expr(e, reg); };
    s.add("secondary constraint", P("2*p3 - p1 - 2*q3 - 1"), ch.constraints.at(1).expr, reg);
    s.add("stability of Omega2", P("4*p3 - 4*q3 + 1 - v"), ch.steps.at(1).condition, reg);
    s.add("multiplier v", P("4*p3 - 4*q3 + 1"), ch.multipliers.at(0).value.value_or(Expr()), reg);
    s.add("Delta12", Expr(1), ch.delta[0][1], reg);
    const std::vector<std::pair<const char*, const char*>> rows = {
        {"q1", "q1"}, {"q2", "4*p3 - 4*q3 + 1"}, {"q3", "4*p2 + 6*p3 - 4*q1 - 8*q3 + 1"},
        {"p1", "4*p3 - 4*q3"}, {"p2", "-1"}, {"p3", "4*p2 + 8*p3 - 4*q1 - 10*q3 + 1"}};
    for (const auto& [name, rhs] : rows) {
      const auto row = std::find_if(c.eom.begin(), c.eom.end(), [&](const auto& e) { return reg[e.first].name == name; });
      s.add(std::string("equation of motion for ") + name, P(rhs), row == c.eom.end() ? Expr() : row->second, reg);
    }
    for (std::size_t i = 1; i <= 3; ++i) {
      for (std::size_t j = 1; j <= 3; ++j) {
        const std::string qi = "q" + std::to_string(i), qj = "q" + std::to_string(j);
        const std::string pi = "p" + std::to_string(i), pj = "p" + std::to_string(j);
        s.add("{" + qi + "," + pj + "}_D", Expr(reference_qp(i, j)),
              dirac_bracket(Expr::var(reg, qi), Expr::var(reg, pj), ch), reg);
        s.add("{" + qi + "," + qj + "}_D", Expr(reference_qq(i, j)),
              dirac_bracket(Expr::var(reg, qi), Expr::var(reg, qj), ch), reg);
        s.add("{" + pi + "," + pj + "}_D", Expr(reference_pp(i, j)),
              dirac_bracket(Expr::var(reg, pi), Expr::var(reg, pj), ch), reg);
      }
    }
  }
  {
    // The closed-form family against the computed flow.
    const auto fam = solution_family();
    bool zero = true;
    for (const auto& [name, r] : flow_residuals(fam, c.eom, c.chain.registry)) zero = zero && r.is_zero();
    s.add("closed-form solution family solves the flow", Expr(1), Expr(zero ? 1 : 0), fam.registry);
  }
  {
    const auto& emb = c.emb;
    const auto& reg = emb.registry;
    auto P = [&](const char* e) { return parse_expr(e, reg); };
    s.add("first-class Omega~1", P("p2 + p3 - q1 - q3 + theta"), emb.fc_constraints.at(0), reg);
    s.add("first-class Omega~2", P("2*p3 - p1 - 2*q3 - 1 - pi_theta"), emb.fc_constraints.at(1), reg);
    const std::vector<std::pair<const char*, const char*>> tilde = {
        {"q1", "q1 - theta"}, {"q2", "q2 + pi_theta"}, {"q3", "q3 + pi_theta + 2*theta"},
        {"p1", "p1 + pi_theta"}, {"p2", "p2"}, {"p3", "p3 + pi_theta + 2*theta"}};
    for (const auto& [z, want] : tilde) s.add(std::string("tilde ") + z, P(want), emb.tilde_map.at(reg.id(z)), reg);
    s.add("first-class Hamiltonian",
          transport(c.leg.canonical_h, c.leg.registry, reg) +
              P("(-4*p3 + 4*q3 - 1)*theta + (p1 - 2*p3 + 2*q3 + 1)*pi_theta + 1/2*pi_theta^2"),
          emb.fc_hamiltonian, reg);
    s.add("{Omega~1,H~'}", emb.fc_constraints[1], poisson_bracket(emb.fc_constraints[0], emb.fc_hamiltonian_prime, reg), reg);
    s.add("{Omega~2,H~'}", Expr(0), poisson_bracket(emb.fc_constraints[1], emb.fc_hamiltonian_prime, reg), reg);

    const auto gauge = gauge_transformations(emb);
    const std::vector<std::pair<const char*, const char*>> rows = {
        {"q1", "-eps2"}, {"q2", "eps1"}, {"q3", "eps1 + 2*eps2"}, {"theta", "-eps2"}};
    for (const auto& [name, want] : rows) {
      const VarId v = gauge.registry.id(name);
      const auto row = std::find_if(gauge.variations.begin(), gauge.variations.end(), [&](const auto& e) { return e.first == v; });
      s.add(std::string("gauge variation of ") + name, parse_expr(want, gauge.registry),
            row == gauge.variations.end() ? Expr() : row->second, gauge.registry);
    }
  }
  {
    const auto& ereg = c.extended.registry;
    const auto momenta = extended_momenta(c);
    for (std::size_t i = 0; i < c.ext_leg.momenta.size(); ++i) {
      const std::string& name = ereg[c.ext_leg.momenta[i]].name;
      s.add("extended momentum " + name, momenta.at(name), c.ext_leg.momentum_defs[i], ereg);
    }
    s.add("Omega~2 in velocities", parse_expr("-d(q1) + d(q2) - d(q3) - 2*q3 - 1 + d(theta)", ereg),
          rewrite_constraint_in_velocities(c.emb.fc_constraints.at(1), c.emb.registry, c.ext_leg), ereg);
  }
  {
    const auto& cx = c.cx;
    const auto& reg = cx.registry;
    auto P = [&](const char* e) { return parse_expr(e, reg); };
    s.add("BRST charge", P("C1*(p2 + p3 - q1 - q3 + theta) + C2*(2*p3 - p1 - 2*q3 - 1 - pi_theta) + P1*B1 + P2*B2"), cx.q, reg);
    s.add("minimal Hamiltonian", transport(c.emb.fc_hamiltonian_prime, c.emb.registry, reg) - P("C1*Pbar2"), cx.hm, reg);
    for (const auto& [name, want] : brst_rows()) {
      s.add(std::string("BRST variation of ") + name, P(want), brst_transform(cx, var(reg, name)), reg);
    }
    s.add("ghost-extended Omega~2", parse_expr(kGhostConstraint, c.frame),
          ghost_extended_constraint(cx, c.emb, c.frame, printed_relations(c)), c.frame);
  }
  return s.checks;
}

std::string analysis_for(const PrintedCheck& p, const Context& c) {
  if (p.location == "equation of motion for q1") {
    const auto fam = solution_family();
    const Expr q1 = fam.values.at("q1");
    const Expr miss = fam.reduce(fam.time_derivative(q1) - q1);
    return "H_T contains p1 only through p1^2/2, so {q1, H_T} = p1; along the closed-form family "
           "d/dt q1 - q1 = " + render(miss, fam.registry) +
           ", which is not identically zero, while d/dt q1 - p1 vanishes; the printed row reads as a typo for p1";
  }
  if (p.location == "minimal Hamiltonian") {
    const auto& reg = c.cx.registry;
    BRSTComplex printed = c.cx;
    printed.hm = transport(c.emb.fc_hamiltonian_prime, c.emb.registry, reg) - Expr::var(reg, "C1") * Expr::var(reg, "Pbar2");
    const Expr rem = poisson_bracket(printed.q, printed.hm, reg);
    return "with {C^a, Pbar_b} = delta and {Omega~1, H~'} = Omega~2, the printed ghost term gives {Q, H_m} = " +
           render(rem, reg) +
           " != 0; the invariance claimed alongside it requires H_m = H~' + C1*Pbar2, which the engine uses";
  }
  if (p.location == "ghost-extended Omega~2") {
    const Expr fixed = ghost_extended_constraint(c.cx, c.emb, c.frame, consistent_relations(c));
    return "the printed momentum relations with pi_theta = -theta' - N2 and N2 = -B2 + 2 theta do not give the "
           "printed constraint; stationarity of the gauge-fixed Lagrangian in pi_theta gives pi_theta = N2 - theta', "
           "and with N2 = -B2 - 2 theta the result is " +
           render(fixed, c.frame) + ", equal to the printed form";
  }
  return "no analysis recorded";
}

std::string join_lines(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += s + "\n";
  return out;
}

}  // namespace

bool VerifyReport::passed() const {
  return !criteria.empty() && std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.passed; });
}

VerifyReport verify_paper(const VerifyOptions& opts) {
  VerifyReport rep;
  const Context c = build_context();
  auto timed = [&](const std::function<CriterionResult()>& fn) {
    const auto t0 = Clock::now();
    CriterionResult r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = seconds_since(t0);
    rep.criteria.push_back(std::move(r));
  };
  timed([&] { return criterion_legendre(c); });
  timed([&] { return criterion_chain(c); });
  timed([&] { return criterion_dirac_brackets(c); });
  timed([&] { return criterion_hj(c); });
  timed([&] { return criterion_embedding(c); });
  timed([&] { return criterion_roundtrip(c); });
  timed([&] { return criterion_brst(c); });
  timed([&] { return criterion_numerics(c, opts); });
  timed([&] { return criterion_properties(opts); });
  for (std::size_t i = 0; i < rep.criteria.size(); ++i) {
    if (rep.criteria[i].number == 0) rep.criteria[i].number = static_cast<int>(i + 1);
  }

  const auto t0 = Clock::now();
  rep.printed = scan_printed(c);
  for (const auto& p : rep.printed) {
    if (!p.match) rep.discrepancies.push_back({p.location, p.printed, p.computed, analysis_for(p, c)});
  }
  CriterionResult ten{10, "Discrepancy ledger", false, {}, 0};
  const bool only_q1 = rep.discrepancies.size() == 1 && rep.discrepancies[0].location == "equation of motion for q1";
  ten.passed = only_q1;
  std::vector<std::string> where;
  for (const auto& d : rep.discrepancies) where.push_back(d.location);
  std::string list;
  for (const auto& w : where) list += (list.empty() ? "" : ", ") + w;
  ten.detail = std::to_string(rep.printed.size()) + " printed results compared, " +
               std::to_string(rep.discrepancies.size()) + " discrepant" + (list.empty() ? "" : " (" + list + ")");
  if (!only_q1) ten.detail += "; exactly one (the q1 equation of motion) was expected";
  ten.seconds = seconds_since(t0);
  rep.criteria.push_back(std::move(ten));
  return rep;
}

std::string format_summary(const VerifyReport& rep) {
  std::vector<std::string> lines;
  for (const auto& c : rep.criteria) {
    char head[96];
    std::snprintf(head, sizeof head, "criterion %2d: %s  ", c.number, c.passed ? "PASS" : "FAIL");
    lines.push_back(head + c.title + " (" + c.detail + ")");
  }
  lines.push_back("discrepancies: " + std::to_string(rep.discrepancies.size()));
  for (const auto& d : rep.discrepancies) {
    lines.push_back("  - " + d.location);
    lines.push_back("    printed:  " + d.printed);
    lines.push_back("    computed: " + d.computed);
    lines.push_back("    analysis: " + d.analysis);
  }
  lines.push_back(rep.passed() ? "result: all criteria pass" : "result: some criteria fail");
  return join_lines(lines);
}

Json to_json(const VerifyReport& rep) {
  Json criteria = Json::array();
  for (const auto& c : rep.criteria) {
    criteria.push_back({{"number", c.number}, {"title", c.title}, {"passed", c.passed}, {"detail", c.detail}});
  }
  Json printed = Json::array();
  for (const auto& p : rep.printed) {
    printed.push_back({{"location", p.location}, {"printed", p.printed}, {"computed", p.computed}, {"match", p.match}});
  }
  Json disc = Json::array();
  for (const auto& d : rep.discrepancies) {
    disc.push_back({{"location", d.location}, {"printed", d.printed}, {"computed", d.computed}, {"analysis", d.analysis}});
  }
  return {{"criteria", criteria}, {"printed_results", printed}, {"discrepancies", disc}, {"passed", rep.passed()}};
}

// --- property suites ---------------------------------------------------------

namespace {

struct RandomAlgebra {
  VariableRegistry reg;
  std::vector<VarId> even, odd;
};

// Layout 0: two even pairs and one odd pair; layout 1: one even pair and two odd pairs.
RandomAlgebra random_algebra(int layout) {
  RandomAlgebra a;
  const int even_pairs = layout == 0 ? 2 : 1;
  const int odd_pairs = layout == 0 ? 1 : 2;
  for (int i = 1; i <= even_pairs; ++i) {
    const VarId x = a.reg.add("x" + std::to_string(i), VarKind::Coordinate);
    const VarId y = a.reg.add("y" + std::to_string(i), VarKind::Momentum);
    a.reg.pair(x, y);
    a.even.insert(a.even.end(), {x, y});
  }
  for (int i = 1; i <= odd_pairs; ++i) {
    const VarId c = a.reg.add("c" + std::to_string(i), VarKind::GhostC, Parity::Odd, 1);
    const VarId b = a.reg.add("b" + std::to_string(i), VarKind::GhostPbar, Parity::Odd, -1);
    a.reg.pair(c, b);
    a.odd.insert(a.odd.end(), {c, b});
  }
  return a;
}

Expr random_homogeneous(std::mt19937_64& rng, const RandomAlgebra& a, Parity parity) {
  std::uniform_int_distribution<int> nterms(1, 4), deg(1, 3), num(-3, 3), den(1, 2);
  Expr out;
  const int n = nterms(rng);
  for (int k = 0; k < n; ++k) {
    const int d = deg(rng);
    // Odd factor count with the requested parity, at most d and at most the odd pool.
    std::vector<int> counts;
    for (int m = 0; m <= std::min<int>(d, static_cast<int>(a.odd.size())); ++m) {
      if ((m % 2 == 1) == (parity == Parity::Odd)) counts.push_back(m);
    }
    if (counts.empty()) continue;
    const int m = counts[std::uniform_int_distribution<std::size_t>(0, counts.size() - 1)(rng)];
    std::vector<VarId> pool = a.odd;
    std::shuffle(pool.begin(), pool.end(), rng);
    Rational coef(num(rng), den(rng));
    coef.canonicalize();
    Expr term(coef);
    for (int i = 0; i < m; ++i) term *= Expr::var(a.reg, pool[i]);
    std::uniform_int_distribution<std::size_t> pick(0, a.even.size() - 1);
    for (int i = m; i < d; ++i) term *= Expr::var(a.reg, a.even[pick(rng)]);
    out += term;
  }
  return out;
}

Rational graded_sign(Parity a, Parity b) {
  return (a == Parity::Odd && b == Parity::Odd) ? Rational(-1) : Rational(1);
}

}  // namespace

PropertyStats bracket_properties(std::uint64_t seed, int triples) {
  PropertyStats st;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  const RandomAlgebra algebras[2] = {random_algebra(0), random_algebra(1)};
  for (int k = 0; k < triples; ++k) {
    const RandomAlgebra& a = algebras[k % 2];
    const auto& reg = a.reg;
    const Parity pf = coin(rng) ? Parity::Odd : Parity::Even;
    const Parity pg = coin(rng) ? Parity::Odd : Parity::Even;
    const Parity ph = coin(rng) ? Parity::Odd : Parity::Even;
    const Expr f = random_homogeneous(rng, a, pf);
    const Expr g = random_homogeneous(rng, a, pg);
    const Expr h = random_homogeneous(rng, a, ph);
    auto br = [&](const Expr& x, const Expr& y) { return poisson_bracket(x, y, reg); };
    auto record = [&](const char* name, const Expr& residual) {
      ++st.checks;
      if (!residual.is_zero()) {
        ++st.failures;
        if (st.first_failure.empty()) {
          st.first_failure = std::string(name) + " with f = " + render(f, reg) + ", g = " + render(g, reg) +
                             ", h = " + render(h, reg) + ": " + render(residual, reg);
        }
      }
    };
    record("antisymmetry", br(f, g) + Expr(graded_sign(pf, pg)) * br(g, f));
    record("Leibniz", br(f, g * h) - (br(f, g) * h + Expr(graded_sign(pf, pg)) * g * br(f, h)));
    record("Jacobi", Expr(graded_sign(pf, ph)) * br(f, br(g, h)) + Expr(graded_sign(pg, pf)) * br(g, br(h, f)) +
                         Expr(graded_sign(ph, pg)) * br(h, br(f, g)));
    ++st.triples;
  }
  return st;
}

std::vector<std::string> model_corpus(std::uint64_t seed, int count) {
  std::vector<std::string> out = {bundled::kNhcs, bundled::kNhcsExtended, bundled::kFreeParticle};
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<int> ncoord(1, 3), nterms(1, 6), num(-5, 5), den(1, 4), deg(0, 2), coin(0, 1);
  const char* aux_names[] = {"theta", "phi"};
  for (int k = static_cast<int>(out.size()); k < count; ++k) {
    std::vector<std::string> syms;
    const int n = ncoord(rng);
    std::string text = "# generated\nmodel corpus" + std::to_string(k) + "\ncoords";
    for (int i = 1; i <= n; ++i) {
      syms.push_back("q" + std::to_string(i));
      text += " q" + std::to_string(i);
    }
    text += "\n";
    if (coin(rng)) {
      const char* a = aux_names[coin(rng)];
      syms.push_back(a);
      text += std::string("aux ") + a + "\n";
    }
    if (coin(rng)) text += "meta origin \"seed " + std::to_string(seed) + "\"\n";
    std::uniform_int_distribution<std::size_t> pick(0, syms.size() - 1);
    std::string lag;
    const int terms = nterms(rng);
    for (int t = 0; t < terms; ++t) {
      int c = num(rng);
      if (c == 0) c = 1;
      std::string term = std::to_string(c) + "/" + std::to_string(den(rng));
      const int nv = deg(rng);
      for (int i = 0; i < nv; ++i) term += "*d(" + syms[pick(rng)] + ")";
      const int nq = deg(rng);
      for (int i = 0; i < nq; ++i) term += "*" + syms[pick(rng)] + (coin(rng) ? "^2" : "");
      lag += (lag.empty() ? "" : " + ") + (coin(rng) ? "(" + term + ")" : term);
    }
    text += "lagrangian: " + lag + "\n";
    out.push_back(std::move(text));
  }
  return out;
}

int roundtrip_failures(const std::vector<std::string>& corpus, std::string* first) {
  int bad = 0;
  for (const auto& text : corpus) {
    std::string why;
    try {
      const ModelSpec a = parse_model(text);
      const std::string rendered = render_model(a);
      const ModelSpec b = parse_model(rendered);
      if (!(a == b)) why = "parse(render(spec)) differs";
      else if (render_model(b) != rendered) why = "rendering is not stable";
    } catch (const std::exception& e) {
      why = e.what();
    }
    if (!why.empty()) {
      ++bad;
      if (first && first->empty()) *first = why + " for:\n" + text;
    }
  }
  return bad;
}

}  // namespace cmech
