#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cmech/bundled_models.hpp"
#include "cmech/error.hpp"
#include "cmech/verify.hpp"

using namespace cmech;

namespace {

enum Exit { kOk = 0, kInconsistent = 1, kUsage = 2 };

struct Options {
  std::string model;
  std::string extended;
  std::string format = "json";
  std::string eom = "total";
  std::string csv;
  std::vector<std::string> gauge;
  double t0 = 0;
  double t1 = 1;
  double dt = 1e-3;
  std::string ic;
  std::uint64_t seed = VerifyOptions{}.seed;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Usage, "cannot read model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ModelSpec load_model(const Options& o) {
  return parse_model(o.model.empty() ? std::string(bundled::kNhcs) : read_file(o.model));
}

void emit(const Options& o, const Json& doc) {
  std::fputs((o.format == "text" ? dump_text(doc) : dump_json(doc)).c_str(), stdout);
}

int run_analyze(const Options& o) {
  const ModelSpec spec = load_model(o);
  const LegendreResult leg = analyze(spec);
  const ConstraintChain chain = run_chain(leg);
  Json results = {{"legendre", to_json(leg)},
                  {"chain", to_json(chain)},
                  {"dirac_brackets", dirac_bracket_table(chain)},
                  {"equations_of_motion", eom_json(hamilton_eom(chain), chain.registry)}};
  emit(o, emit_report("analyze", spec, std::move(results)));
  return kOk;
}

int run_hj(const Options& o) {
  const ModelSpec spec = load_model(o);
  const LegendreResult leg = analyze(spec);
  const HJSystem sys = integrability_closure(build_hj_system(leg));
  const ConstraintChain chain = run_chain(leg);
  Json odes = Json::array();
  for (const auto& p : sys.parameters) {
    if (sys.velocity_fixings.count(p.coordinate)) odes.push_back(to_json(derive_parameter_ode(sys, p.coordinate), sys.registry));
  }
  Json residuals = Json::array();
  for (const auto& r : integrability_residuals(sys)) residuals.push_back(render(r, sys.registry));
  Json results = {{"system", to_json(sys)},
                  {"parameter_odes", odes},
                  {"integrability_residuals", residuals},
                  {"dirac_equivalence", to_json(compare_with_dirac(sys, chain))}};
  emit(o, emit_report("hj", spec, std::move(results)));
  return kOk;
}

int run_embed(const Options& o) {
  const ModelSpec spec = load_model(o);
  const LegendreResult leg = analyze(spec);
  const EmbeddingResult emb = bft_embed(run_chain(leg));
  const GaussReport gauss = check_gauss_algebra(emb);
  Json results = {{"embedding", to_json(emb)},
                  {"gauss_algebra", to_json(gauss, emb.registry)},
                  {"gauge_transformations", to_json(gauge_transformations(emb))}};
  std::string ext = o.extended;
  if (ext.empty() && o.model.empty()) ext = bundled::kNhcsExtended;
  else if (!ext.empty()) ext = read_file(ext);
  bool ok = gauss.ok();
  if (!ext.empty()) {
    const RoundTripReport rt = roundtrip_lagrangian(parse_model(ext), emb, {});
    results["round_trip"] = to_json(rt);
    ok = ok && rt.ok();
  }
  emit(o, emit_report("embed", spec, std::move(results)));
  return ok ? kOk : kInconsistent;
}

int run_brst(const Options& o) {
  const ModelSpec spec = load_model(o);
  const EmbeddingResult emb = bft_embed(run_chain(analyze(spec)));
  std::vector<Expr> gauge = emb.original;
  if (!o.gauge.empty()) {
    gauge.clear();
    for (const auto& g : o.gauge) gauge.push_back(parse_expr(g, emb.registry));
  }
  const BRSTComplex cx = build_complex(emb, gauge);
  const auto ids = check_brst_identities(cx);
  Json results = {{"complex", to_json(cx)}, {"identities", to_json(ids, cx.registry)}, {"brst_transformations", brst_table(cx)}};
  emit(o, emit_report("brst", spec, std::move(results)));
  for (const auto& id : ids) {
    if (!id.ok()) return kInconsistent;
  }
  return kOk;
}

std::map<std::string, double> parse_ic(const std::string& text) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::Usage, "initial condition '" + item + "' is not name=value");
    const std::string name = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw Error(ErrorCode::Usage, "bad number in initial condition '" + item + "'");
    out[name] = v;
  }
  return out;
}

int run_simulate(const Options& o) {
  if (!(o.dt > 0)) throw Error(ErrorCode::Usage, "--dt must be positive");
  if (!(o.t1 > o.t0)) throw Error(ErrorCode::Usage, "--t1 must exceed --t0");
  const ModelSpec spec = load_model(o);
  const ConstraintChain chain = run_chain(analyze(spec));
  const EquationsOfMotion eom = o.eom == "dirac" ? dirac_eom(chain) : hamilton_eom(chain);
  for (const auto& m : chain.multipliers) {
    if (!m.value && o.eom != "dirac") {
      throw Error(ErrorCode::UnsupportedModel, "multiplier '" + chain.registry[m.symbol].name + "' is undetermined");
    }
  }
  const VectorField field = compile_rhs(eom, chain.registry);
  const auto ic = parse_ic(o.ic);
  State s0{o.t0, std::vector<double>(field.names.size(), 0.0)};
  for (const auto& [name, v] : ic) {
    const auto it = std::find(field.names.begin(), field.names.end(), name);
    if (it == field.names.end()) throw Error(ErrorCode::Usage, "'" + name + "' is not a phase-space variable");
    s0.values[static_cast<std::size_t>(it - field.names.begin())] = v;
  }
  std::vector<std::string> res_names;
  for (std::size_t a = 0; a < chain.constraints.size(); ++a) res_names.push_back("res" + std::to_string(a + 1));
  const Trajectory traj = integrate_rk4(field, s0, o.t1, o.dt, compile_constraints(chain, field), res_names);
  const std::string csv = trajectory_csv(traj);
  if (o.csv == "-") {
    std::fputs(csv.c_str(), stdout);
    return kOk;
  }
  if (!o.csv.empty()) {
    std::ofstream out(o.csv, std::ios::binary);
    if (!out) throw Error(ErrorCode::Usage, "cannot write '" + o.csv + "'");
    out << csv;
  }
  Json results = trajectory_summary(traj);
  results["eom"] = o.eom;
  results["dt"] = o.dt;
  emit(o, emit_report("simulate", spec, std::move(results)));
  return kOk;
}

int run_verify(const Options& o) {
  VerifyOptions vo;
  vo.seed = o.seed;
  const VerifyReport rep = verify_paper(vo);
  if (o.format == "json") {
    emit(o, emit_report("verify-paper", parse_model(bundled::kNhcs), to_json(rep)));
  } else {
    std::fputs(format_summary(rep).c_str(), stdout);
  }
  return rep.passed() ? kOk : kInconsistent;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax:
    case ErrorCode::UnknownSymbol:
    case ErrorCode::VelocityDegree:
    case ErrorCode::DuplicateCoordinate:
    case ErrorCode::UnregisteredSymbol:
    case ErrorCode::Usage:
      return kUsage;
    default:
      return kInconsistent;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained-mechanics engine: Dirac, Hamilton-Jacobi, first-class embedding and BRST analyses"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--model", o.model, "model file (default: the bundled nonholonomic model)");
    sub->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "text"}));
  };
  auto* analyze_cmd = app.add_subcommand("analyze", "Legendre transform, Dirac chain and Dirac brackets");
  common(analyze_cmd);
  auto* hj_cmd = app.add_subcommand("hj", "Hamilton-Jacobi integrability closure");
  common(hj_cmd);
  auto* embed_cmd = app.add_subcommand("embed", "first-class embedding, Gauss algebra and Lagrangian round trip");
  common(embed_cmd);
  embed_cmd->add_option("--extended", o.extended, "extended Lagrangian for the round trip");
  auto* brst_cmd = app.add_subcommand("brst", "BRST complex and identity checks");
  common(brst_cmd);
  brst_cmd->add_option("--gauge", o.gauge, "gauge conditions, one per constraint (default: unitary)");
  auto* sim_cmd = app.add_subcommand("simulate", "RK4 integration of the equations of motion");
  common(sim_cmd);
  sim_cmd->add_option("--t0", o.t0, "initial time");
  sim_cmd->add_option("--t1", o.t1, "final time");
  sim_cmd->add_option("--dt", o.dt, "step size");
  sim_cmd->add_option("--ic", o.ic, "initial conditions name=value,...");
  sim_cmd->add_option("--csv", o.csv, "write the trajectory CSV here ('-' for stdout)");
  sim_cmd->add_option("--eom", o.eom, "equations of motion source")->check(CLI::IsMember({"total", "dirac"}));
  auto* verify_cmd = app.add_subcommand("verify-paper", "run every reproduction criterion on the bundled model");
  verify_cmd->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "text"}));
  verify_cmd->add_option("--seed", o.seed, "seed for the random suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  if (verify_cmd->parsed() && verify_cmd->count("--format") == 0) o.format = "text";

  try {
    if (analyze_cmd->parsed()) return run_analyze(o);
    if (hj_cmd->parsed()) return run_hj(o);
    if (embed_cmd->parsed()) return run_embed(o);
    if (brst_cmd->parsed()) return run_brst(o);
    if (sim_cmd->parsed()) return run_simulate(o);
    if (verify_cmd->parsed()) return run_verify(o);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInconsistent;
  }
  return kUsage;
}
