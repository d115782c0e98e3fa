#include "support.hpp"

using namespace cmech;
using fixture::P;

namespace {

VariableRegistry phase_space() {
  VariableRegistry reg;
  for (int i = 1; i <= 3; ++i) reg.add("q" + std::to_string(i), VarKind::Coordinate);
  for (int i = 1; i <= 3; ++i) {
    const VarId p = reg.add("p" + std::to_string(i), VarKind::Momentum);
    reg.pair(reg.id("q" + std::to_string(i)), p);
  }
  reg.pair(reg.add("theta", VarKind::AuxCoordinate), reg.add("pi_theta", VarKind::AuxMomentum));
  for (int a = 1; a <= 2; ++a) {
    const auto s = std::to_string(a);
    reg.pair(reg.add("C" + s, VarKind::GhostC, Parity::Odd, 1), reg.add("Pbar" + s, VarKind::GhostPbar, Parity::Odd, -1));
    reg.pair(reg.add("P" + s, VarKind::GhostP, Parity::Odd, 1), reg.add("Cbar" + s, VarKind::GhostCbar, Parity::Odd, -1));
    reg.pair(reg.add("N" + s, VarKind::LagrangeN), reg.add("B" + s, VarKind::LagrangeB));
  }
  reg.pair(reg.add("t", VarKind::Time), reg.add("p0", VarKind::TimeMomentum));
  reg.add("v", VarKind::FormalConstant);
  reg.add_velocity(reg.id("q1"));
  return reg;
}

const char* kOmega1 = "p2 + p3 - q1 - q3";
const char* kOmega2 = "2*p3 - p1 - 2*q3 - 1";
const char* kH0 = "1/2*(p1^2 - 2*p3^2) + q1 + q2 + q3^2";

}  // namespace

TEST_CASE("registry bookkeeping") {
  VariableRegistry reg = phase_space();
  CHECK(reg[reg.id("d(q1)")].kind == VarKind::Velocity);
  CHECK(reg.velocity_of(reg.id("q1")) == reg.id("d(q1)"));
  CHECK_FALSE(reg.velocity_of(reg.id("q2")));
  CHECK(reg.is_momentum_like(reg.id("p2")));
  CHECK(reg.is_momentum_like(reg.id("Pbar1")));
  CHECK_FALSE(reg.is_momentum_like(reg.id("q2")));
  CHECK_THROWS_CODE(reg.add("q1", VarKind::Coordinate), ErrorCode::DuplicateSymbol);
  CHECK_THROWS_CODE(reg.id("nope"), ErrorCode::UnregisteredSymbol);
  CHECK_THROWS_CODE(reg.add_velocity(reg.id("p1")), ErrorCode::InvalidRegistry);
  const VarId odd = reg.add("eta", VarKind::FormalConstant, Parity::Odd);
  const VarId even = reg.add("x", VarKind::Coordinate);
  CHECK_THROWS_CODE(reg.pair(even, odd), ErrorCode::ParityMismatch);
}

TEST_CASE("canonical form") {
  const VariableRegistry reg = phase_space();
  CHECK_EXPR(reg, P(reg, "(q1 + q2)^2"), P(reg, "q1^2 + 2*q1*q2 + q2^2"));
  CHECK(P(reg, "q1 - q1").is_zero());
  CHECK(P(reg, "3/6*q1") == P(reg, "1/2*q1"));
  CHECK(render(P(reg, "2/4*q1^2 - p3"), reg) == "1/2*q1^2 - p3");

  SUBCASE("odd factors anticommute and square to zero") {
    CHECK_EXPR(reg, P(reg, "C2*C1"), -P(reg, "C1*C2"));
    CHECK(P(reg, "C1*C1").is_zero());
    CHECK(P(reg, "C1*Pbar2*C1").is_zero());
    CHECK_EXPR(reg, P(reg, "Pbar1*C2*C1"), P(reg, "-C1*C2*Pbar1"));
    CHECK_EXPR(reg, P(reg, "Pbar1*C1"), -P(reg, "C1*Pbar1"));
  }
  SUBCASE("parity") {
    CHECK(P(reg, "C1*q1 + P1").parity() == Parity::Odd);
    CHECK(P(reg, "C1*C2 + q1").parity() == Parity::Even);
    CHECK_FALSE(P(reg, "C1 + q1").parity());
    CHECK(Expr().parity() == Parity::Even);
  }
  SUBCASE("rendering parses back") {
    for (const char* s : {kOmega1, kOmega2, kH0, "-1/3*C1*Pbar2*q3^2 + 7", "C1*C2*Pbar1*Pbar2 - theta*pi_theta"}) {
      const Expr e = P(reg, s);
      CHECK_EXPR(reg, P(reg, render(e, reg).c_str()), e);
    }
  }
  SUBCASE("ghost number per monomial") {
    const Expr q = P(reg, "C1*p2 + P1*B1 + C2*C1*Pbar1");
    CHECK(has_ghost_number(q, reg, 1));
    CHECK_FALSE(has_ghost_number(q + P(reg, "Cbar1"), reg, 1));
  }
}

TEST_CASE("graded derivatives") {
  const VariableRegistry reg = phase_space();
  CHECK_EXPR(reg, derivative(P(reg, "q3^2"), reg.id("q3"), reg), P(reg, "2*q3"));
  const Expr cc = P(reg, "C1*C2");
  CHECK_EXPR(reg, derivative(cc, reg.id("C2"), Side::Right, reg), P(reg, "C1"));
  CHECK_EXPR(reg, derivative(cc, reg.id("C1"), Side::Left, reg), P(reg, "C2"));
  CHECK_EXPR(reg, derivative(cc, reg.id("C2"), Side::Left, reg), -P(reg, "C1"));
  CHECK_EXPR(reg, derivative(cc, reg.id("C1"), Side::Right, reg), -P(reg, "C2"));
}

TEST_CASE("Poisson bracket") {
  const VariableRegistry reg = phase_space();
  auto br = [&](const char* a, const char* b) { return poisson_bracket(P(reg, a), P(reg, b), reg); };
  CHECK_EXPR(reg, br("q1", "p1"), Expr(1));
  CHECK_EXPR(reg, br("p1", "q1"), Expr(-1));
  CHECK_EXPR(reg, br(kOmega1, kOmega2), Expr(1));
  CHECK_EXPR(reg, br(kOmega1, kH0), P(reg, kOmega2));
  CHECK_EXPR(reg, br("theta", "pi_theta"), Expr(1));

  SUBCASE("ghost sector") {
    CHECK_EXPR(reg, br("C1", "Pbar1"), Expr(1));
    CHECK_EXPR(reg, br("Pbar1", "C1"), Expr(1));
    CHECK_EXPR(reg, br("C1", "Pbar2"), Expr(0));
    CHECK_EXPR(reg, br("P2", "Cbar2"), Expr(1));
    CHECK_EXPR(reg, br("N1", "B1"), Expr(1));
    CHECK_EXPR(reg, br("N1", "B2"), Expr(0));
  }
  SUBCASE("time pair only in the extended bracket") {
    CHECK_EXPR(reg, br("t", "p0"), Expr(0));
    CHECK_EXPR(reg, extended_bracket(P(reg, "t"), P(reg, "p0"), reg), Expr(1));
    const Expr h0p = P(reg, "p0") + P(reg, kH0);
    CHECK_EXPR(reg, extended_bracket(P(reg, kOmega1), h0p, reg), P(reg, kOmega2));
    CHECK_EXPR(reg, extended_bracket(P(reg, "p0"), h0p, reg), Expr(0));
    CHECK_EXPR(reg, extended_bracket(P(reg, kOmega2), h0p, reg), P(reg, "4*p3 - 4*q3 + 1"));
  }
  SUBCASE("errors") {
    CHECK_THROWS_CODE(br("d(q1)", "p1"), ErrorCode::VelocityInBracket);
    CHECK_EXPR(reg, br("v*q1", "p1"), P(reg, "v"));
    VariableRegistry loose = reg;
    const VarId y = loose.add("y", VarKind::Coordinate);
    CHECK_THROWS_CODE(poisson_bracket(Expr::var(loose, y), P(loose, "p1"), loose), ErrorCode::MissingConjugate);
  }
}

TEST_CASE("bracket identities on random triples") {
  const auto stats = bracket_properties(7, 300);
  CHECK(stats.triples == 300);
  CHECK(stats.checks == 900);
  CHECK_MESSAGE(stats.failures == 0, stats.first_failure);
}

TEST_CASE("substitution") {
  const VariableRegistry reg = phase_space();
  const Substitution zero = {{reg.id("theta"), Expr()}, {reg.id("pi_theta"), Expr()}};
  CHECK_EXPR(reg, substitute(P(reg, "p2 + p3 - q1 - q3 + theta"), zero, reg), P(reg, kOmega1));
  const Substitution tilde = {{reg.id("q1"), P(reg, "q1 - theta")},          {reg.id("q2"), P(reg, "q2 + pi_theta")},
                              {reg.id("q3"), P(reg, "q3 + pi_theta + 2*theta")}, {reg.id("p1"), P(reg, "p1 + pi_theta")},
                              {reg.id("p3"), P(reg, "p3 + pi_theta + 2*theta")}};
  CHECK_EXPR(reg, substitute(P(reg, kH0), tilde, reg),
             P(reg, kH0) + P(reg, "(-4*p3 + 4*q3 - 1)*theta + (p1 - 2*p3 + 2*q3 + 1)*pi_theta + 1/2*pi_theta^2"));
  CHECK_THROWS_CODE(substitute(P(reg, "q1^2"), {{reg.id("q1"), P(reg, "C1")}}, reg), ErrorCode::ParityMismatch);
  CHECK_THROWS_CODE(substitute(P(reg, "C1"), {{reg.id("C1"), P(reg, "q1")}}, reg), ErrorCode::ParityMismatch);
  // Odd images keep their place in the product.
  CHECK_EXPR(reg, substitute(P(reg, "C1*C2"), {{reg.id("C1"), P(reg, "P1")}}, reg), P(reg, "C2*P1") * Expr(-1));
}

TEST_CASE("weak reduction") {
  const VariableRegistry reg = phase_space();
  const std::vector<Expr> cons = {P(reg, kOmega1), P(reg, kOmega2)};
  CHECK(reduce_weak(P(reg, kOmega2), cons, reg).is_zero());
  const Expr cond = P(reg, "4*p3 - 4*q3 + 1 - v");
  CHECK(reduce_weak(substitute(cond, {{reg.id("v"), P(reg, "4*p3 - 4*q3 + 1")}}, reg), cons, reg).is_zero());
  CHECK_EXPR(reg, reduce_weak(P(reg, "q1"), cons, reg), P(reg, "q1"));

  const auto pivots = weak_pivots(cons, reg);
  for (const auto& [v, e] : pivots) CHECK(reg.is_momentum_like(v));

  const Expr f = P(reg, "p3^2 + p2*q1 - p1");
  const Expr once = reduce_weak(f, cons, reg);
  CHECK_EXPR(reg, reduce_weak(once, cons, reg), once);
  for (const auto& [v, e] : pivots) CHECK_FALSE(once.contains(v));

  CHECK_THROWS_CODE(reduce_weak(f, {P(reg, "p1^2 - q1")}, reg), ErrorCode::NonlinearConstraint);
  CHECK_THROWS_CODE(reduce_weak(f, {P(reg, kOmega1), P(reg, "2*p2 + 2*p3 - 2*q1 - 2*q3")}, reg),
                    ErrorCode::DependentConstraints);
}

TEST_CASE("constraint normalization") {
  const VariableRegistry reg = phase_space();
  CHECK_EXPR(reg, normalize_constraint(P(reg, "-p1 + 2*p3 - 2*q3 - 1"), reg), P(reg, kOmega2));
  CHECK_EXPR(reg, normalize_constraint(P(reg, "-1/2*p3 + 1/4*p1 + 1/2*q3 + 1/4"), reg), P(reg, kOmega2));
  const Expr once = normalize_constraint(P(reg, "6*q1 - 3*p2"), reg);
  CHECK_EXPR(reg, normalize_constraint(once, reg), once);
  CHECK(proportionality(P(reg, "-2*p2 + 4*q1"), P(reg, "p2 - 2*q1")) == Rational(-2));
  CHECK_FALSE(proportionality(P(reg, "p2 + q1"), P(reg, "p2 - q1")));
}

TEST_CASE("linear split in multipliers") {
  const VariableRegistry reg = phase_space();
  const auto s = split_linear(P(reg, "4*p3 - 4*q3 + 1 - v + q1*v"), {reg.id("v")});
  CHECK_EXPR(reg, s.rest, P(reg, "4*p3 - 4*q3 + 1"));
  CHECK_EXPR(reg, s.coefficients.at(0), P(reg, "q1 - 1"));
  CHECK_THROWS_CODE(split_linear(P(reg, "v^2"), {reg.id("v")}), ErrorCode::NonlinearConstraint);
}
