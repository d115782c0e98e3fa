#include "support.hpp"

using namespace cmech;
using fixture::P;

namespace {

Expr aux_limit(const Expr& e, const EmbeddingResult& emb) {
  Substitution zero;
  for (const auto& [th, pi] : emb.aux_pairs) {
    zero[th] = Expr();
    zero[pi] = Expr();
  }
  return substitute(e, zero, emb.registry);
}

}  // namespace

TEST_CASE("first-class constraints and tilde variables") {
  const auto& emb = fixture::embedding();
  const auto& reg = emb.registry;
  REQUIRE(emb.aux_pairs.size() == 1);
  CHECK(reg[emb.aux_pairs[0].first].name == "theta");
  CHECK(reg[emb.aux_pairs[0].second].name == "pi_theta");
  CHECK_EXPR(reg, poisson_bracket(P(reg, "theta"), P(reg, "pi_theta"), reg), Expr(1));

  REQUIRE(emb.fc_constraints.size() == 2);
  CHECK_EXPR(reg, emb.fc_constraints[0], P(reg, "p2 + p3 - q1 - q3 + theta"));
  CHECK_EXPR(reg, emb.fc_constraints[1], P(reg, "2*p3 - p1 - 2*q3 - 1 - pi_theta"));
  CHECK(emb.x(0, 0) == 1);
  CHECK(emb.x(0, 1) == 0);
  CHECK(emb.x(1, 0) == 0);
  CHECK(emb.x(1, 1) == -1);

  const std::pair<const char*, const char*> tilde[] = {
      {"q1", "q1 - theta"},        {"q2", "q2 + pi_theta"}, {"q3", "q3 + pi_theta + 2*theta"},
      {"p1", "p1 + pi_theta"},     {"p2", "p2"},            {"p3", "p3 + pi_theta + 2*theta"}};
  for (const auto& [name, want] : tilde) {
    CAPTURE(name);
    CHECK_EXPR(reg, emb.tilde_map.at(reg.id(name)), P(reg, want));
  }

  SUBCASE("strong involution and gauge invariance") {
    for (const auto& a : emb.fc_constraints) {
      for (const auto& b : emb.fc_constraints) CHECK(poisson_bracket(a, b, reg).is_zero());
      for (const auto& [z, t] : emb.tilde_map) CHECK(poisson_bracket(a, t, reg).is_zero());
    }
  }
  SUBCASE("vanishing auxiliaries give back the second-class data") {
    for (std::size_t a = 0; a < 2; ++a) CHECK_EXPR(reg, aux_limit(emb.fc_constraints[a], emb), emb.original[a]);
    for (const auto& [z, t] : emb.tilde_map) CHECK_EXPR(reg, aux_limit(t, emb), Expr::var(reg, z));
    CHECK_EXPR(reg, aux_limit(emb.fc_hamiltonian, emb), emb.h0);
    CHECK_EXPR(reg, aux_limit(emb.fc_hamiltonian_prime, emb), emb.h0);
  }
  SUBCASE("tilde algebra reproduces the Dirac algebra") {
    const auto& ch = fixture::nhcs().chain;
    for (VarId u : emb.phase_space) {
      for (VarId v : emb.phase_space) {
        const Expr tb = aux_limit(poisson_bracket(emb.tilde_map.at(u), emb.tilde_map.at(v), reg), emb);
        const Expr db = dirac_bracket(Expr::var(ch.registry, reg[u].name), Expr::var(ch.registry, reg[v].name), ch);
        CHECK_EXPR(reg, tb, transport(db, ch.registry, reg));
      }
    }
  }
}

TEST_CASE("first-class Hamiltonians") {
  const auto& emb = fixture::embedding();
  const auto& reg = emb.registry;
  const Expr explicit_form =
      P(reg, "1/2*(p1^2 - 2*p3^2) + q1 + q2 + q3^2 + (-4*p3 + 4*q3 - 1)*theta + (p1 - 2*p3 + 2*q3 + 1)*pi_theta + 1/2*pi_theta^2");
  CHECK_EXPR(reg, emb.fc_hamiltonian, explicit_form);
  CHECK_EXPR(reg, emb.fc_hamiltonian, substitute(emb.h0, emb.tilde_map, reg));
  CHECK_EXPR(reg, emb.improvement, P(reg, "pi_theta") * emb.fc_constraints[1]);
  CHECK_EXPR(reg, emb.fc_hamiltonian_prime, emb.fc_hamiltonian + emb.improvement);
}

TEST_CASE("Gauss law algebra") {
  const auto& emb = fixture::embedding();
  const auto& reg = emb.registry;
  const GaussReport rep = check_gauss_algebra(emb);
  CHECK(rep.ok());
  REQUIRE(rep.brackets.size() == 2);
  CHECK_EXPR(reg, rep.brackets[0], emb.fc_constraints[1]);
  CHECK(rep.brackets[1].is_zero());
  CHECK_FALSE(rep.limit_checks.empty());
  for (const auto& c : rep.limit_checks) CHECK_MESSAGE(c.ok, c.label);

  SUBCASE("dropping the improvement term breaks the first identity") {
    // H~ is built from gauge-invariant variables, so both of its brackets vanish.
    const GaussReport bad = check_gauss_algebra(emb, emb.fc_hamiltonian);
    CHECK_FALSE(bad.ok());
    CHECK(bad.brackets[0].is_zero());
    CHECK(bad.brackets[1].is_zero());
    REQUIRE(bad.checks.size() == 2);
    CHECK_FALSE(bad.checks[0].ok);
    CHECK(bad.checks[1].ok);
  }
}

TEST_CASE("Lagrangian round trip") {
  const auto& emb = fixture::embedding();
  const ModelSpec& ext = fixture::extended();
  const auto& ereg = ext.registry;
  const std::map<std::string, Expr> expected = {
      {"p1", P(ereg, "d(q1) + 2*theta")},
      {"p2", P(ereg, "1/2*(d(q3) - d(q2)) + q1 + q3 - theta")},
      {"p3", P(ereg, "1/2*(d(q2) - d(q3))")},
      {"pi_theta", P(ereg, "-d(theta) - 2*theta")}};
  const RoundTripReport rt = roundtrip_lagrangian(ext, emb, expected);
  CHECK(rt.ok());
  CHECK(rt.momenta.size() == 4);
  for (const auto& m : rt.momenta) CHECK_MESSAGE(m.ok, m.label);
  CHECK(rt.primary.ok);
  CHECK(rt.secondary.ok);
  CHECK(rt.first_class);
  CHECK(rt.free_multipliers == 1);
  CHECK(rt.hamiltonian.ok);

  SUBCASE("a wrong expected momentum is reported") {
    auto wrong = expected;
    wrong["pi_theta"] = P(ereg, "-d(theta) + 2*theta");
    const RoundTripReport bad = roundtrip_lagrangian(ext, emb, wrong);
    CHECK_FALSE(bad.ok());
    CHECK(bad.primary.ok);
  }
}

TEST_CASE("gauge transformations") {
  const GaugeTable tab = gauge_transformations(fixture::embedding());
  const auto& reg = tab.registry;
  std::map<std::string, Expr> delta;
  for (const auto& [v, e] : tab.variations) delta[reg[v].name] = e;
  CHECK_EXPR(reg, delta.at("q1"), P(reg, "-eps2"));
  CHECK_EXPR(reg, delta.at("q2"), P(reg, "eps1"));
  CHECK_EXPR(reg, delta.at("q3"), P(reg, "eps1 + 2*eps2"));
  CHECK_EXPR(reg, delta.at("theta"), P(reg, "-eps2"));
  // Direct bracket oracle: p2 appears in Omega~1 only through itself.
  const Expr gen = P(reg, "eps1") * transport(fixture::embedding().fc_constraints[0], fixture::embedding().registry, reg) +
                   P(reg, "eps2") * transport(fixture::embedding().fc_constraints[1], fixture::embedding().registry, reg);
  CHECK(poisson_bracket(P(reg, "p2"), gen, reg).is_zero());
  Substitution off;
  for (VarId e : tab.parameters) off[e] = Expr();
  for (const auto& [v, e] : tab.variations) CHECK(substitute(e, off, reg).is_zero());
}

TEST_CASE("embedding preconditions") {
  CHECK_THROWS_CODE(bft_embed(run_chain(analyze(fixture::extended()))), ErrorCode::NotSecondClass);
  const EmbeddingResult none = bft_embed(run_chain(analyze(fixture::free_particle())));
  CHECK(none.aux_pairs.empty());
  CHECK(none.fc_constraints.empty());
  CHECK_EXPR(none.registry, none.fc_hamiltonian_prime, none.h0);
}
