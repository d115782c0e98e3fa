#include "support.hpp"

using namespace cmech;
using fixture::P;

namespace {

void check_solved_velocities_are_consistent(const LegendreResult& leg) {
  const auto& reg = leg.registry;
  for (std::size_t i : leg.solvable) {
    const Expr back = substitute(leg.momentum_defs[i], leg.solved_velocities, reg);
    CHECK_EXPR(reg, back, Expr::var(reg, leg.momenta[i]));
  }
  for (std::size_t k = 0; k < leg.constrained.size(); ++k) {
    const std::size_t a = leg.constrained[k];
    const Expr back = substitute(leg.momentum_defs[a], leg.solved_velocities, reg);
    CHECK_EXPR(reg, back, Expr::var(reg, leg.momenta[a]) - leg.primary_constraints[k]);
  }
  for (VarId v : leg.velocities) CHECK_FALSE(leg.canonical_h.contains(v));
  CHECK(leg.rank + leg.primary_constraints.size() == leg.coordinates.size());
}

}  // namespace

TEST_CASE("Legendre transform of the nonholonomic model") {
  const auto& leg = fixture::nhcs().leg;
  const auto& reg = leg.registry;
  REQUIRE(leg.momentum_defs.size() == 3);
  CHECK_EXPR(reg, leg.momentum_defs[0], P(reg, "d(q1)"));
  CHECK_EXPR(reg, leg.momentum_defs[1], P(reg, "1/2*(d(q3) - d(q2)) + q1 + q3"));
  CHECK_EXPR(reg, leg.momentum_defs[2], P(reg, "1/2*(d(q2) - d(q3))"));
  CHECK(leg.rank == 2);
  CHECK(leg.solvable == std::vector<std::size_t>{0, 2});
  CHECK(leg.constrained == std::vector<std::size_t>{1});
  REQUIRE(leg.primary_constraints.size() == 1);
  CHECK_EXPR(reg, leg.primary_constraints[0], P(reg, "p2 + p3 - q1 - q3"));
  CHECK_EXPR(reg, leg.canonical_h, P(reg, "1/2*(p1^2 - 2*p3^2) + q1 + q2 + q3^2"));

  // Hessian by hand: rows (1,0,0), (0,-1/2,1/2), (0,1/2,-1/2).
  const Rational h[3][3] = {{1, 0, 0}, {0, Rational(-1, 2), Rational(1, 2)}, {0, Rational(1, 2), Rational(-1, 2)}};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(leg.hessian(i, j) == h[i][j]);
  }
  check_solved_velocities_are_consistent(leg);
}

TEST_CASE("canonical Hamiltonian equals p q' - L on the momentum surface") {
  // Brute check: with the velocities written in terms of momenta, p q' - L
  // loses every velocity once the constrained momentum is eliminated.
  const auto& leg = fixture::nhcs().leg;
  const auto& reg = leg.registry;
  const ModelSpec& spec = fixture::nhcs().spec;
  Expr pqdot;
  for (std::size_t i = 0; i < 3; ++i) pqdot += leg.momentum_defs[i] * Expr::var(reg, leg.velocities[i]);
  const Expr h_qqdot = pqdot - spec.lagrangian;
  Substitution p_defs;
  for (std::size_t i = 0; i < 3; ++i) p_defs[leg.momenta[i]] = leg.momentum_defs[i];
  CHECK_EXPR(reg, substitute(leg.canonical_h, p_defs, reg), h_qqdot);
}

TEST_CASE("free particle and degenerate examples") {
  SUBCASE("free particle") {
    const LegendreResult leg = analyze(fixture::free_particle());
    const auto& reg = leg.registry;
    CHECK(leg.rank == 1);
    CHECK(leg.primary_constraints.empty());
    CHECK_EXPR(reg, leg.momentum_defs[0], P(reg, "d(q)"));
    CHECK_EXPR(reg, leg.canonical_h, P(reg, "1/2*p^2"));
    check_solved_velocities_are_consistent(leg);
  }
  SUBCASE("single relative velocity") {
    const LegendreResult leg = analyze(parse_model("coords q1 q2\nlagrangian: 1/2*(d(q1) - d(q2))^2"));
    const auto& reg = leg.registry;
    CHECK(leg.rank == 1);
    REQUIRE(leg.primary_constraints.size() == 1);
    CHECK_EXPR(reg, leg.primary_constraints[0], P(reg, "p1 + p2"));
    // Weakly the same as 1/2 p1^2; the last coordinate is the solved one.
    CHECK_EXPR(reg, leg.canonical_h, P(reg, "1/2*p2^2"));
    CHECK(reduce_weak(leg.canonical_h - P(reg, "1/2*p1^2"), leg.primary_constraints, reg).is_zero());
    check_solved_velocities_are_consistent(leg);
  }
  SUBCASE("rank zero") {
    const LegendreResult leg = analyze(parse_model("coords q1 q2\nlagrangian: q1*d(q2) - q1^2 - q2^2"));
    const auto& reg = leg.registry;
    CHECK(leg.rank == 0);
    REQUIRE(leg.primary_constraints.size() == 2);
    CHECK_EXPR(reg, leg.primary_constraints[0], P(reg, "p1"));
    CHECK_EXPR(reg, leg.primary_constraints[1], P(reg, "p2 - q1"));
    CHECK_EXPR(reg, leg.canonical_h, P(reg, "q1^2 + q2^2"));
  }
  SUBCASE("coordinate dependent Hessian") {
    CHECK_THROWS_CODE(analyze(parse_model("coords q\nlagrangian: q*d(q)^2")), ErrorCode::UnsupportedModel);
  }
}

TEST_CASE("Legendre transform of the extended model") {
  const LegendreResult leg = analyze(fixture::extended());
  const auto& reg = leg.registry;
  REQUIRE(leg.momentum_defs.size() == 4);
  CHECK_EXPR(reg, leg.momentum_defs[0], P(reg, "d(q1) + 2*theta"));
  CHECK_EXPR(reg, leg.momentum_defs[1], P(reg, "1/2*(d(q3) - d(q2)) + q1 + q3 - theta"));
  CHECK_EXPR(reg, leg.momentum_defs[2], P(reg, "1/2*(d(q2) - d(q3))"));
  CHECK_EXPR(reg, leg.momentum_defs[3], P(reg, "-d(theta) - 2*theta"));
  CHECK(leg.rank == 3);
  REQUIRE(leg.primary_constraints.size() == 1);
  CHECK_EXPR(reg, leg.primary_constraints[0], P(reg, "p2 + p3 - q1 - q3 + theta"));
  check_solved_velocities_are_consistent(leg);
}
