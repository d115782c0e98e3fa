#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cmech {

enum class Parity : std::uint8_t { Even, Odd };

inline Parity operator+(Parity a, Parity b) {
  return (a == b) ? Parity::Even : Parity::Odd;
}

enum class VarKind {
  Coordinate,
  Momentum,
  AuxCoordinate,
  AuxMomentum,
  GhostC,
  GhostPbar,
  GhostP,
  GhostCbar,
  LagrangeN,
  LagrangeB,
  Time,
  TimeMomentum,
  Velocity,
  FormalConstant,
};

std::string_view to_string(VarKind kind);

using VarId = std::uint32_t;

struct Variable {
  std::string name;
  Parity parity = Parity::Even;
  VarKind kind = VarKind::FormalConstant;
  std::optional<VarId> conjugate;
  // True for the first member of a conjugate pair, the one with {self, conjugate} = +1.
  bool position_like = false;
  // Velocity variables only: the coordinate they differentiate.
  std::optional<VarId> base;
  int ghost_number = 0;
};

/// Ordered table of every symbol an expression may mention.
///
/// Declaration order is significant: it fixes the monomial order, the sign
/// convention for products of odd variables, and pivot tie-breaking. Ids are
/// stable under extension, so an expression built against a registry stays
/// valid in any registry that copies and then extends it.
class VariableRegistry {
 public:
  VarId add(std::string name, VarKind kind, Parity parity = Parity::Even, int ghost_number = 0);

  // Declares d(name) for an existing Coordinate or AuxCoordinate.
  VarId add_velocity(VarId coordinate);

  // Declares (position, momentum) as conjugate with {position, momentum} = +1.
  void pair(VarId position, VarId momentum);

  std::optional<VarId> find(std::string_view name) const;
  VarId id(std::string_view name) const;  // throws UnregisteredSymbol
  bool contains(VarId id) const { return id < vars_.size(); }

  const Variable& operator[](VarId id) const { return vars_.at(id); }
  std::size_t size() const { return vars_.size(); }
  const std::vector<Variable>& variables() const { return vars_; }

  std::optional<VarId> velocity_of(VarId coordinate) const;

  // (position, momentum) pairs in position-id order.
  std::vector<std::pair<VarId, VarId>> conjugate_pairs() const;

  // Momentum-like half of a pair (the side that is not position-like).
  bool is_momentum_like(VarId id) const;

 private:
  std::vector<Variable> vars_;
  std::map<std::string, VarId, std::less<>> index_;
};

}  // namespace cmech
