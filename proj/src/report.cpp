#include "cmech/report.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>

namespace cmech {

namespace {

std::string r(const Expr& e, const VariableRegistry& reg) { return render(e, reg); }

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json matrix_json(const RationalMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).get_str());
    rows.push_back(row);
  }
  return rows;
}

Json check_json(const IdentityCheck& c, const VariableRegistry& reg) {
  return {{"label", c.label}, {"expected", r(c.expected, reg)}, {"actual", r(c.actual, reg)}, {"ok", c.ok}};
}

std::string outcome_name(ChainStep::Outcome o) {
  switch (o) {
    case ChainStep::Outcome::Stable: return "stable";
    case ChainStep::Outcome::NewConstraint: return "new constraint";
    case ChainStep::Outcome::FixedMultiplier: return "fixes multiplier";
  }
  return "?";
}

}  // namespace

std::string model_hash(const ModelSpec& spec) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : render_model(spec)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

Json to_json(const LegendreResult& leg) {
  const auto& reg = leg.registry;
  Json momenta = Json::object();
  for (std::size_t i = 0; i < leg.momenta.size(); ++i) momenta[reg[leg.momenta[i]].name] = r(leg.momentum_defs[i], reg);
  Json solved = Json::object();
  for (const auto& [v, e] : leg.solved_velocities) solved[reg[v].name] = r(e, reg);
  Json primaries = Json::array();
  for (std::size_t k = 0; k < leg.primary_constraints.size(); ++k) {
    primaries.push_back({{"coordinate", reg[leg.coordinates[leg.constrained[k]]].name},
                         {"expr", r(leg.primary_constraints[k], reg)}});
  }
  return {{"momenta", momenta},
          {"hessian", matrix_json(leg.hessian)},
          {"rank", leg.rank},
          {"solvable_velocities", solved},
          {"primary_constraints", primaries},
          {"canonical_hamiltonian", r(leg.canonical_h, reg)}};
}

Json to_json(const ConstraintChain& chain) {
  const auto& reg = chain.registry;
  Json cons = Json::array();
  for (std::size_t a = 0; a < chain.constraints.size(); ++a) {
    const auto& c = chain.constraints[a];
    cons.push_back({{"label", "Omega" + std::to_string(a + 1)},
                    {"expr", r(c.expr, reg)},
                    {"raw", r(c.raw, reg)},
                    {"generation", c.generation},
                    {"class", std::string(to_string(c.cls))}});
  }
  Json delta = Json::array();
  for (const auto& row : chain.delta) {
    Json out = Json::array();
    for (const auto& e : row) out.push_back(r(e, reg));
    delta.push_back(out);
  }
  Json mult = Json::object();
  for (const auto& m : chain.multipliers) mult[reg[m.symbol].name] = m.value ? Json(r(*m.value, reg)) : Json("free");
  Json steps = Json::array();
  for (const auto& s : chain.steps) {
    steps.push_back({{"constraint", "Omega" + std::to_string(s.constraint + 1)},
                     {"condition", r(s.condition, reg)},
                     {"outcome", outcome_name(s.outcome)}});
  }
  return {{"constraints", cons},
          {"delta", delta},
          {"delta_inverse", chain.delta_inverse ? matrix_json(*chain.delta_inverse) : Json()},
          {"multipliers", mult},
          {"total_hamiltonian", r(chain.total_h, reg)},
          {"generations", chain.generations},
          {"steps", steps}};
}

Json dirac_bracket_table(const ConstraintChain& chain) {
  if (!chain.all_second() || chain.constraints.empty()) return Json();
  const auto& reg = chain.registry;
  Json table = Json::object();
  for (VarId u : chain.phase_space) {
    Json row = Json::object();
    for (VarId v : chain.phase_space) {
      row[reg[v].name] = r(dirac_bracket(Expr::var(reg, u), Expr::var(reg, v), chain), reg);
    }
    table[reg[u].name] = row;
  }
  return table;
}

Json eom_json(const EquationsOfMotion& eom, const VariableRegistry& reg) {
  Json out = Json::object();
  for (const auto& [z, e] : eom) out["d" + reg[z].name] = r(e, reg);
  return out;
}

Json to_json(const HJSystem& sys) {
  const auto& reg = sys.registry;
  Json hp = Json::array();
  for (const auto& h : sys.hprimes) hp.push_back({{"label", h.label}, {"expr", r(h.expr, reg)}, {"derived", h.derived}});
  Json params = Json::array({"t"});
  for (const auto& p : sys.parameters) params.push_back(reg[p.coordinate].name);
  Json table = Json::object();
  for (const auto& row : sys.eom_table) {
    Json coefs = Json::object();
    coefs["dt"] = r(row.coefficients[0], reg);
    for (std::size_t k = 0; k < sys.parameters.size(); ++k) {
      coefs["d" + reg[sys.parameters[k].coordinate].name] = r(row.coefficients[k + 1], reg);
    }
    table["d" + reg[row.variable].name] = coefs;
  }
  Json derived = Json::array();
  for (const auto& d : sys.derived_constraints) derived.push_back(r(d, reg));
  Json fix = Json::object();
  for (const auto& [q, f] : sys.velocity_fixings) fix["dot_" + reg[q].name] = r(f, reg);
  Json log = Json::array();
  for (const auto& b : sys.log) {
    log.push_back({{"round", b.round}, {"entry", b.entry}, {"condition", r(b.condition, reg)}, {"outcome", b.outcome}});
  }
  return {{"hprimes", hp},
          {"parameters", params},
          {"eom_table", table},
          {"derived_constraints", derived},
          {"velocity_fixings", fix},
          {"closure_log", log},
          {"rounds", sys.rounds},
          {"closed", sys.closed},
          {"time_pair", "(t, p0): the only conjugate pair added for the extended bracket"}};
}

Json to_json(const ParameterOde& ode, const VariableRegistry& reg) {
  return {{"parameter", reg[ode.parameter].name},
          {"ode", r(ode.ode, reg) + " = 0"},
          {"autonomous", ode.autonomous},
          {"rate", r(ode.rate, reg)}};
}

Json to_json(const EquivalenceReport& rep) {
  return {{"constraints_match", rep.constraints_match},
          {"fixings_match", rep.fixings_match},
          {"full_match", rep.full_match()},
          {"matches", rep.matches},
          {"mismatches", rep.mismatches}};
}

Json to_json(const EmbeddingResult& emb) {
  const auto& reg = emb.registry;
  Json aux = Json::array();
  for (const auto& [t, p] : emb.aux_pairs) aux.push_back({reg[t].name, reg[p].name});
  Json fc = Json::array();
  for (const auto& c : emb.fc_constraints) fc.push_back(r(c, reg));
  Json tilde = Json::object();
  for (VarId z : emb.phase_space) tilde[reg[z].name] = r(emb.tilde_map.at(z), reg);
  return {{"aux_pairs", aux},
          {"fc_constraints", fc},
          {"x_matrix", matrix_json(emb.x)},
          {"tilde_map", tilde},
          {"fc_hamiltonian", r(emb.fc_hamiltonian, reg)},
          {"improvement_term", r(emb.improvement, reg)},
          {"fc_hamiltonian_prime", r(emb.fc_hamiltonian_prime, reg)}};
}

Json to_json(const GaussReport& rep, const VariableRegistry& reg) {
  Json checks = Json::array();
  for (const auto& c : rep.checks) checks.push_back(check_json(c, reg));
  Json limits = Json::array();
  for (const auto& c : rep.limit_checks) limits.push_back(check_json(c, reg));
  return {{"checks", checks}, {"limit_checks", limits}, {"ok", rep.ok()}};
}

Json to_json(const RoundTripReport& rep) {
  const auto& reg = rep.legendre.registry;
  Json momenta = Json::array();
  for (const auto& c : rep.momenta) momenta.push_back(check_json(c, reg));
  return {{"momenta", momenta},
          {"primary", check_json(rep.primary, reg)},
          {"secondary", check_json(rep.secondary, reg)},
          {"first_class", rep.first_class},
          {"free_multipliers", rep.free_multipliers},
          {"hamiltonian", check_json(rep.hamiltonian, reg)},
          {"ok", rep.ok()}};
}

Json to_json(const GaugeTable& table) {
  Json out = Json::object();
  for (const auto& [v, e] : table.variations) out["delta " + table.registry[v].name] = r(e, table.registry);
  return out;
}

Json to_json(const BRSTComplex& cx) {
  const auto& reg = cx.registry;
  Json gauge = Json::array();
  for (const auto& g : cx.gauge) gauge.push_back(r(g, reg));
  return {{"Q", r(cx.q, reg)},
          {"Psi", r(cx.psi, reg)},
          {"H_m", r(cx.hm, reg)},
          {"H_tot", r(cx.htot, reg)},
          {"gauge", gauge},
          {"structure", matrix_json(cx.structure)},
          {"brst_convention", "delta_B f = -lambda {Q, f}"}};
}

Json to_json(const std::vector<BRSTIdentity>& ids, const VariableRegistry& reg) {
  Json out = Json::array();
  for (const auto& i : ids) out.push_back({{"identity", i.label}, {"remainder", r(i.remainder, reg)}, {"ok", i.ok()}});
  return out;
}

Json brst_table(const BRSTComplex& cx) {
  const auto& reg = cx.registry;
  Json out = Json::object();
  std::vector<VarId> vars;
  for (const auto& v : reg.variables()) {
    if (v.kind == VarKind::Coordinate || v.kind == VarKind::AuxCoordinate) vars.push_back(reg.id(v.name));
  }
  for (const auto* family : {&cx.c, &cx.cbar, &cx.p, &cx.pbar, &cx.n, &cx.b}) vars.insert(vars.end(), family->begin(), family->end());
  for (VarId v : vars) out["delta_B " + reg[v].name] = r(brst_transform(cx, Expr::var(reg, v)), reg);
  return out;
}

Json trajectory_summary(const Trajectory& traj) {
  Json res = Json::object();
  for (std::size_t k = 0; k < traj.residual_names.size(); ++k) {
    double worst = 0;
    for (const auto& row : traj.residuals) worst = std::max(worst, std::fabs(row[k]));
    res[traj.residual_names[k]] = fmt17(worst);
  }
  Json final_state = Json::object();
  if (!traj.states.empty()) {
    for (std::size_t i = 0; i < traj.names.size(); ++i) final_state[traj.names[i]] = fmt17(traj.states.back()[i]);
  }
  return {{"steps", traj.grid.empty() ? 0 : traj.grid.size() - 1},
          {"t0", traj.grid.empty() ? "" : fmt17(traj.grid.front())},
          {"t1", traj.grid.empty() ? "" : fmt17(traj.grid.back())},
          {"final_state", final_state},
          {"max_abs_residual", res}};
}

Json emit_report(const std::string& analysis, const ModelSpec& model, Json results) {
  return {{"engine", {{"name", kEngineName}, {"version", kEngineVersion}}},
          {"model", {{"name", model.name}, {"hash", model_hash(model)}}},
          {"analysis", analysis},
          {"results", std::move(results)}};
}

std::string dump_json(const Json& doc) { return doc.dump(2) + "\n"; }

namespace {

void text_into(const Json& j, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  auto scalar = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_structured() && !v.empty()) {
        out += pad + k + ":\n";
        text_into(v, depth + 1, out);
      } else {
        out += pad + k + ": " + (v.is_structured() ? std::string("(none)") : scalar(v)) + "\n";
      }
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (v.is_structured() && !v.empty()) {
        out += pad + "-\n";
        text_into(v, depth + 1, out);
      } else {
        out += pad + "- " + (v.is_structured() ? std::string("(none)") : scalar(v)) + "\n";
      }
    }
  } else {
    out += pad + scalar(j) + "\n";
  }
}

}  // namespace

std::string dump_text(const Json& doc) {
  std::string out;
  text_into(doc, 0, out);
  return out;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t";
  for (const auto& n : traj.names) out += "," + n;
  for (const auto& n : traj.residual_names) out += "," + n;
  out += "\n";
  for (std::size_t k = 0; k < traj.grid.size(); ++k) {
    out += fmt17(traj.grid[k]);
    for (double v : traj.states[k]) out += "," + fmt17(v);
    for (double v : traj.residuals[k]) out += "," + fmt17(v);
    out += "\n";
  }
  return out;
}

}  // namespace cmech
