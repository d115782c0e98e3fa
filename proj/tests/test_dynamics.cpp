#include "support.hpp"

#include <cmath>
#include <random>

using namespace cmech;
using fixture::P;

namespace {

const VectorField& nhcs_field() {
  static const VectorField f = compile_rhs(hamilton_eom(fixture::nhcs().chain), fixture::nhcs().chain.registry);
  return f;
}

std::size_t index_of(const VectorField& f, const char* name) {
  return static_cast<std::size_t>(std::find(f.names.begin(), f.names.end(), name) - f.names.begin());
}

double max_error(const Trajectory& traj, const SolutionConstants& c) {
  double worst = 0;
  for (std::size_t s = 0; s < traj.grid.size(); ++s) {
    const State exact = analytic_solution(c, traj.grid[s]);
    for (std::size_t i = 0; i < 6; ++i) worst = std::max(worst, std::fabs(traj.states[s][i] - exact.values[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("compiled vector fields") {
  const VectorField& f = nhcs_field();
  CHECK(f.names == std::vector<std::string>{"q1", "q2", "q3", "p1", "p2", "p3"});
  std::vector<double> x(6, 0.0);
  x[index_of(f, "q3")] = 1;
  x[index_of(f, "p3")] = 2;
  const auto r = f.rhs.eval(x);
  CHECK(r[index_of(f, "q2")] == 5.0);
  CHECK(r[index_of(f, "p2")] == -1.0);
  for (double v : {0.3, -7.0}) {
    std::vector<double> y(6, v);
    CHECK(f.rhs.eval(y)[index_of(f, "p2")] == -1.0);
  }

  const auto free_chain = run_chain(analyze(fixture::free_particle()));
  const VectorField ff = compile_rhs(hamilton_eom(free_chain), free_chain.registry);
  CHECK(ff.rhs.eval({0.0, 2.0})[0] == 2.0);

  SUBCASE("unresolved symbols") {
    const auto ext = run_chain(analyze(fixture::extended()));
    CHECK_THROWS_CODE(compile_rhs(hamilton_eom(ext), ext.registry), ErrorCode::UnregisteredSymbol);
  }
}

TEST_CASE("RK4 integration") {
  SUBCASE("free particle is exact") {
    const auto ch = run_chain(analyze(fixture::free_particle()));
    const VectorField f = compile_rhs(hamilton_eom(ch), ch.registry);
    const Trajectory t = integrate_rk4(f, {0, {0.0, 1.0}}, 1.0, 0.1);
    CHECK(t.grid.back() == 1.0);
    CHECK(t.states.back()[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(t.states.back()[1] == 1.0);
  }
  SUBCASE("grid lands on the final time") {
    const Trajectory t = integrate_rk4(nhcs_field(), analytic_solution({1, 0, 0, 0}, 0), 0.35, 0.1);
    REQUIRE(t.grid.size() == 5);
    CHECK(t.grid[3] == doctest::Approx(0.3));
    CHECK(t.grid.back() == 0.35);
    for (std::size_t i = 1; i < t.grid.size(); ++i) CHECK(t.grid[i] > t.grid[i - 1]);
  }
  SUBCASE("closed-form family from the unit constants") {
    const State s0 = analytic_solution({1, 0, 0, 0}, 0);
    CHECK(s0.values == std::vector<double>{1, 2, 1, 1, 0, 2});
    const auto& ch = fixture::nhcs().chain;
    const Trajectory t = integrate_rk4(nhcs_field(), s0, 1.0, 1e-3, compile_constraints(ch, nhcs_field()), {"res1", "res2"});
    const State exact = analytic_solution({1, 0, 0, 0}, 1);
    CHECK(exact.values[0] == doctest::Approx(std::exp(2.0) - 1));
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(std::fabs(t.states.back()[i] - exact.values[i]) <= 1e-6 * std::max(1.0, std::fabs(exact.values[i])));
    }
    double worst = 0;
    for (const auto& r : t.residuals) worst = std::max({worst, std::fabs(r[0]), std::fabs(r[1])});
    CHECK(worst <= 1e-8);
  }
  SUBCASE("fourth-order convergence") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int k = 0; k < 3; ++k) {
      const SolutionConstants c{u(rng), u(rng), u(rng), u(rng)};
      const double e1 = max_error(integrate_rk4(nhcs_field(), analytic_solution(c, 0), 1.0, 0.02), c);
      const double e2 = max_error(integrate_rk4(nhcs_field(), analytic_solution(c, 0), 1.0, 0.01), c);
      CHECK(e1 / e2 > 12);
      CHECK(e1 / e2 < 20);
    }
  }
  SUBCASE("bad arguments") {
    const State s0 = analytic_solution({}, 0);
    CHECK_THROWS_CODE(integrate_rk4(nhcs_field(), s0, 1.0, 0.0), ErrorCode::Usage);
    CHECK_THROWS_CODE(integrate_rk4(nhcs_field(), s0, 0.0, 0.1), ErrorCode::Usage);
    CHECK_THROWS_CODE(integrate_rk4(nhcs_field(), {0, {1.0}}, 1.0, 0.1), ErrorCode::Usage);
    // q3 grows like e^{2t}; the state overflows long before t = 400.
    CHECK_THROWS_CODE(integrate_rk4(nhcs_field(), analytic_solution({1, 0, 0, 0}, 0), 400.0, 0.5), ErrorCode::NonFinite);
  }
  SUBCASE("total and Dirac equations agree on the surface") {
    const auto& ch = fixture::nhcs().chain;
    const VectorField fd = compile_rhs(dirac_eom(ch), ch.registry);
    const State s0 = analytic_solution({0.5, -1, 0.25, 2}, 0);
    const auto a = integrate_rk4(nhcs_field(), s0, 0.5, 0.01);
    const auto b = integrate_rk4(fd, s0, 0.5, 0.01);
    for (std::size_t i = 0; i < 6; ++i) CHECK(a.states.back()[i] == doctest::Approx(b.states.back()[i]).epsilon(1e-9));
  }
}

TEST_CASE("analytic solution and fitted constants") {
  const State z = analytic_solution({0, 0, 0, 0}, 0.7);
  CHECK(z.values[0] == doctest::Approx(-0.7));
  CHECK(z.values[3] == -1.0);
  CHECK(z.values[4] == doctest::Approx(-0.7));

  // Both constraints vanish at t = 0 for any constants.
  const auto& ch = fixture::nhcs().chain;
  const CompiledPolynomials cons = compile_constraints(ch, nhcs_field());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 5; ++k) {
    const SolutionConstants c{u(rng), u(rng), u(rng), u(rng)};
    for (double r : cons.eval(analytic_solution(c, 0).values)) CHECK(std::fabs(r) < 1e-14);
    const SolutionConstants back = fit_constants(analytic_solution(c, 0));
    CHECK(back.a == doctest::Approx(c.a));
    CHECK(back.b == doctest::Approx(c.b));
    CHECK(back.c1 == doctest::Approx(c.c1));
    CHECK(back.c2 == doctest::Approx(c.c2));
  }

  const SolutionConstants unit = fit_constants({0, {1, 2, 1, 1, 0, 2}});
  CHECK(unit.a == 1);
  CHECK(unit.b == 0);
  CHECK(unit.c1 == 0);
  CHECK(unit.c2 == 0);
  const SolutionConstants origin = fit_constants({0, {0, 0, 0, -1, 0, 0}});
  CHECK(origin.a == 0);
  CHECK(origin.b == -0.5);
  CHECK(origin.c2 == 0);

  try {
    fit_constants({0, {1.001, 2, 1, 1, 0, 2}});
    FAIL("expected an off-family error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OffSolutionFamily);
    CHECK(std::string(e.what()).find("q1 = A + C1") != std::string::npos);
  }
}

TEST_CASE("symbolic flow check") {
  const SolutionFamily fam = solution_family();
  const auto& reg = fam.registry;
  CHECK_EXPR(reg, fam.reduce(P(reg, "Ep^3*Em^2")), P(reg, "Ep"));
  CHECK_EXPR(reg, fam.time_derivative(P(reg, "Ep")), P(reg, "2*Ep"));
  CHECK_EXPR(reg, fam.time_derivative(P(reg, "Em*t")), P(reg, "-2*Em*t + Em"));
  CHECK_EXPR(reg, fam.values.at("q1"), P(reg, "A*Ep - t + C1"));

  const auto& ch = fixture::nhcs().chain;
  const auto res = flow_residuals(fam, hamilton_eom(ch), ch.registry);
  REQUIRE(res.size() == 6);
  for (const auto& [name, r] : res) CHECK_MESSAGE(r.is_zero(), name << ": " << render(r, reg));

  // The constraints vanish identically along the family.
  for (const auto& c : ch.constraints) CHECK(fam.evaluate(c.expr, ch.registry).is_zero());

  SUBCASE("a wrong row leaves a residual") {
    EquationsOfMotion eom = hamilton_eom(ch);
    eom[0].second = Expr::var(ch.registry, "q1");
    const auto bad = flow_residuals(fam, eom, ch.registry);
    CHECK_FALSE(bad[0].second.is_zero());
    for (std::size_t i = 1; i < bad.size(); ++i) CHECK(bad[i].second.is_zero());
  }
}
