#include "support.hpp"

#include <fstream>
#include <sstream>

using namespace cmech;
using fixture::P;

namespace {

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class Fn>
void expect_parse_error(Fn fn, ErrorCode code, int line) {
  try {
    fn();
    FAIL("no parse error");
  } catch (const ParseError& e) {
    CHECK_MESSAGE(e.code() == code, e.what());
    CHECK(e.line() == line);
    CHECK(e.column() >= 1);
  }
}

}  // namespace

TEST_CASE("parse the nonholonomic model") {
  const ModelSpec spec = parse_model(bundled::kNhcs);
  CHECK(spec.name == "nhcs");
  CHECK(spec.coordinates == std::vector<std::string>{"q1", "q2", "q3"});
  CHECK(spec.aux.empty());
  const auto& reg = spec.registry;
  CHECK(reg.size() == 9);
  CHECK(reg[reg.id("p2")].kind == VarKind::Momentum);
  CHECK(reg[reg.id("d(q3)")].kind == VarKind::Velocity);
  CHECK_EXPR(reg, spec.lagrangian,
             P(reg, "1/2*d(q1)^2 - 1/4*d(q2)^2 + 1/2*d(q2)*d(q3) - 1/4*d(q3)^2 + q1*d(q2) + q3*d(q2) - q1 - q2 - q3^2"));
}

TEST_CASE("extended model registers the auxiliary coordinate") {
  const ModelSpec spec = parse_model(bundled::kNhcsExtended);
  CHECK(spec.aux == std::vector<std::string>{"theta"});
  CHECK(spec.registry[spec.registry.id("pi_theta")].kind == VarKind::AuxMomentum);
  CHECK(spec.registry.find("d(theta)"));
  CHECK(momentum_name("q7") == "p7");
  CHECK(momentum_name("theta") == "pi_theta");
}

TEST_CASE("free particle") {
  const ModelSpec spec = parse_model("coords q\nlagrangian: 1/2*d(q)^2");
  CHECK(spec.coordinates.size() == 1);
  CHECK(render(spec.lagrangian, spec.registry) == "1/2*d(q)^2");
}

TEST_CASE("parse errors carry positions") {
  expect_parse_error([] { parse_model("coords q\nlagrangian: d(q)^3"); }, ErrorCode::VelocityDegree, 2);
  expect_parse_error([] { parse_model("coords q\nlagrangian: d(q)*d(q)*q + d(q)^2*d(q)"); }, ErrorCode::VelocityDegree, 2);
  expect_parse_error([] { parse_model("coords q q\nlagrangian: q"); }, ErrorCode::DuplicateCoordinate, 1);
  expect_parse_error([] { parse_model("coords q\n\nlagrangian: x*d(q)"); }, ErrorCode::UnknownSymbol, 3);
  expect_parse_error([] { parse_model("coords q\nlagrangian: d(p)"); }, ErrorCode::UnknownSymbol, 2);
  expect_parse_error([] { parse_model("coords q\nlagrangian: (q + 1"); }, ErrorCode::Syntax, 2);
  expect_parse_error([] { parse_model("coords q\nlagrangian: q $ 2"); }, ErrorCode::Syntax, 2);
  expect_parse_error([] { parse_model("coords q\nlagrangian: q / q"); }, ErrorCode::Syntax, 2);
  expect_parse_error([] { parse_model("coords q\nlagrangian: q^-1"); }, ErrorCode::Syntax, 2);
}

TEST_CASE("comments and whitespace are ignored") {
  const ModelSpec a = parse_model("# c\nmodel   m\ncoords q1   q2 # trailing\nlagrangian:\n  1/2*d(q1)^2\n  - q2\n");
  const ModelSpec b = parse_model("model m\ncoords q1 q2\nlagrangian: 1/2*d(q1)^2 - q2");
  CHECK(a == b);
}

TEST_CASE("metadata round-trips") {
  const ModelSpec a = parse_model("model m\ncoords q\nmeta source \"hand written\"\nlagrangian: d(q)^2");
  CHECK(a.metadata.at("source") == "hand written");
  CHECK(parse_model(render_model(a)) == a);
}

TEST_CASE("render then parse over the corpus") {
  const auto corpus = model_corpus(99, 40);
  CHECK(corpus.size() == 40);
  std::string first;
  CHECK_MESSAGE(roundtrip_failures(corpus, &first) == 0, first);
}

TEST_CASE("bundled models equal the shipped files") {
  CHECK(read(CMECH_MODEL_DIR "/nhcs.model") == bundled::kNhcs);
  CHECK(read(CMECH_MODEL_DIR "/nhcs_extended.model") == bundled::kNhcsExtended);
  CHECK(read(CMECH_MODEL_DIR "/free_particle.model") == bundled::kFreeParticle);
}

TEST_CASE("reports") {
  const auto& n = fixture::nhcs();
  const Json doc = emit_report("analyze", n.spec, {{"chain", to_json(n.chain)}});
  for (const char* key : {"engine", "model", "analysis", "results"}) CHECK(doc.contains(key));
  CHECK(doc["engine"]["version"] == kEngineVersion);
  CHECK(doc["model"]["hash"].get<std::string>().size() == 16);
  CHECK(model_hash(n.spec) == model_hash(parse_model(render_model(n.spec))));
  CHECK(model_hash(n.spec) != model_hash(fixture::free_particle()));

  const Json& cons = doc["results"]["chain"]["constraints"];
  REQUIRE(cons.size() == 2);
  CHECK(cons[0]["expr"] == "-q1 - q3 + p2 + p3");
  CHECK(cons[1]["expr"] == "-2*q3 - p1 + 2*p3 - 1");
  CHECK(cons[1]["class"] == "second");
  CHECK(doc["results"]["chain"]["multipliers"]["v"] == "-4*q3 + 4*p3 + 1");

  SUBCASE("deterministic") {
    const auto again = fixture::Nhcs{};
    CHECK(dump_json(doc) == dump_json(emit_report("analyze", again.spec, {{"chain", to_json(again.chain)}})));
    CHECK(dump_text(doc) == dump_text(emit_report("analyze", again.spec, {{"chain", to_json(again.chain)}})));
  }
  SUBCASE("empty constraint list") {
    const auto spec = fixture::free_particle();
    const Json j = to_json(run_chain(analyze(spec)));
    CHECK(j["constraints"].empty());
    CHECK(j["total_hamiltonian"] == "1/2*p^2");
  }
}

TEST_CASE("trajectory CSV") {
  const auto& n = fixture::nhcs();
  const VectorField f = compile_rhs(hamilton_eom(n.chain), n.chain.registry);
  const auto traj = integrate_rk4(f, analytic_solution({1, 0, 0, 0}, 0), 0.25, 0.1, compile_constraints(n.chain, f),
                                  {"res1", "res2"});
  const std::string csv = trajectory_csv(traj);
  CHECK(csv.substr(0, csv.find('\n')) == "t,q1,q2,q3,p1,p2,p3,res1,res2");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find("\n0.25,") != std::string::npos);
  CHECK(csv.find("0.10000000000000001,") != std::string::npos);
}
