#pragma once

#include <json.hpp>
#include <string>

#include "cmech/brst.hpp"
#include "cmech/dynamics.hpp"
#include "cmech/fcembed.hpp"
#include "cmech/hjscheme.hpp"
#include "cmech/modelio.hpp"

namespace cmech {

using Json = nlohmann::json;  // object keys sorted, so dumps are stable

inline constexpr const char* kEngineName = "cmech";
inline constexpr const char* kEngineVersion = "1.0.0";

// FNV-1a 64 of the rendered model, as 16 hex digits.
std::string model_hash(const ModelSpec& spec);

Json to_json(const LegendreResult& leg);
Json to_json(const ConstraintChain& chain);
Json dirac_bracket_table(const ConstraintChain& chain);  // null unless second class
Json eom_json(const EquationsOfMotion& eom, const VariableRegistry& reg);
Json to_json(const HJSystem& sys);
Json to_json(const ParameterOde& ode, const VariableRegistry& reg);
Json to_json(const EquivalenceReport& rep);
Json to_json(const EmbeddingResult& emb);
Json to_json(const GaussReport& rep, const VariableRegistry& reg);
Json to_json(const RoundTripReport& rep);
Json to_json(const GaugeTable& table);
Json to_json(const BRSTComplex& cx);
Json to_json(const std::vector<BRSTIdentity>& ids, const VariableRegistry& reg);
Json brst_table(const BRSTComplex& cx);
Json trajectory_summary(const Trajectory& traj);

/// {engine, model, analysis, results}.
Json emit_report(const std::string& analysis, const ModelSpec& model, Json results);

std::string dump_json(const Json& doc);
// Indented "key: value" listing of the same document.
std::string dump_text(const Json& doc);

// Header t,<names>,<residual names>; 17 significant digits.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace cmech
