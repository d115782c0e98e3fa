#include "cmech/registry.hpp"

#include "cmech/error.hpp"

namespace cmech {

std::string_view to_string(VarKind kind) {
  switch (kind) {
    case VarKind::Coordinate: return "Coordinate";
    case VarKind::Momentum: return "Momentum";
    case VarKind::AuxCoordinate: return "AuxCoordinate";
    case VarKind::AuxMomentum: return "AuxMomentum";
    case VarKind::GhostC: return "GhostC";
    case VarKind::GhostPbar: return "GhostPbar";
    case VarKind::GhostP: return "GhostP";
    case VarKind::GhostCbar: return "GhostCbar";
    case VarKind::LagrangeN: return "LagrangeN";
    case VarKind::LagrangeB: return "LagrangeB";
    case VarKind::Time: return "Time";
    case VarKind::TimeMomentum: return "TimeMomentum";
    case VarKind::Velocity: return "Velocity";
    case VarKind::FormalConstant: return "FormalConstant";
  }
  return "?";
}

VarId VariableRegistry::add(std::string name, VarKind kind, Parity parity, int ghost_number) {
  if (name.empty()) throw Error(ErrorCode::InvalidRegistry, "empty symbol name");
  if (index_.count(name) != 0) {
    throw Error(ErrorCode::DuplicateSymbol, "symbol '" + name + "' already declared");
  }
  if (kind == VarKind::Velocity) {
    throw Error(ErrorCode::InvalidRegistry, "velocities are declared with add_velocity");
  }
  const auto id = static_cast<VarId>(vars_.size());
  Variable v;
  v.name = name;
  v.kind = kind;
  v.parity = parity;
  v.ghost_number = ghost_number;
  vars_.push_back(std::move(v));
  index_.emplace(std::move(name), id);
  return id;
}

VarId VariableRegistry::add_velocity(VarId coordinate) {
  const Variable& c = vars_.at(coordinate);
  if (c.kind != VarKind::Coordinate && c.kind != VarKind::AuxCoordinate) {
    throw Error(ErrorCode::InvalidRegistry, "velocity of non-coordinate '" + c.name + "'");
  }
  if (velocity_of(coordinate)) {
    throw Error(ErrorCode::DuplicateSymbol, "velocity of '" + c.name + "' already declared");
  }
  std::string name = "d(" + c.name + ")";
  const auto id = static_cast<VarId>(vars_.size());
  Variable v;
  v.name = name;
  v.kind = VarKind::Velocity;
  v.parity = c.parity;
  v.base = coordinate;
  vars_.push_back(std::move(v));
  index_.emplace(std::move(name), id);
  return id;
}

void VariableRegistry::pair(VarId position, VarId momentum) {
  Variable& q = vars_.at(position);
  Variable& p = vars_.at(momentum);
  if (position == momentum) throw Error(ErrorCode::InvalidRegistry, "self-conjugate symbol");
  if (q.conjugate || p.conjugate) {
    throw Error(ErrorCode::InvalidRegistry,
                "'" + q.name + "' or '" + p.name + "' already has a conjugate");
  }
  if (q.parity != p.parity) {
    throw Error(ErrorCode::ParityMismatch,
                "conjugate pair (" + q.name + ", " + p.name + ") has unequal parity");
  }
  if (q.kind == VarKind::Velocity || p.kind == VarKind::Velocity) {
    throw Error(ErrorCode::InvalidRegistry, "velocities have no conjugate");
  }
  q.conjugate = momentum;
  p.conjugate = position;
  q.position_like = true;
  p.position_like = false;
}

std::optional<VarId> VariableRegistry::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VarId VariableRegistry::id(std::string_view name) const {
  if (auto v = find(name)) return *v;
  throw Error(ErrorCode::UnregisteredSymbol, "unregistered symbol '" + std::string(name) + "'");
}

std::optional<VarId> VariableRegistry::velocity_of(VarId coordinate) const {
  for (VarId i = 0; i < vars_.size(); ++i) {
    if (vars_[i].kind == VarKind::Velocity && vars_[i].base == coordinate) return i;
  }
  return std::nullopt;
}

std::vector<std::pair<VarId, VarId>> VariableRegistry::conjugate_pairs() const {
  std::vector<std::pair<VarId, VarId>> out;
  for (VarId i = 0; i < vars_.size(); ++i) {
    if (vars_[i].conjugate && vars_[i].position_like) out.emplace_back(i, *vars_[i].conjugate);
  }
  return out;
}

bool VariableRegistry::is_momentum_like(VarId id) const {
  const Variable& v = vars_.at(id);
  return v.conjugate.has_value() && !v.position_like;
}

}  // namespace cmech
