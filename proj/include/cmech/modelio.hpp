#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cmech/expr.hpp"
#include "cmech/registry.hpp"

namespace cmech {

/// A Lagrangian model: declared coordinates, optional auxiliary coordinates,
/// and a polynomial Lagrangian at most quadratic in the velocities d(s).
///
/// The registry is derived from the declarations, in this order: coordinates,
/// auxiliary coordinates, their momenta, then one velocity per coordinate.
struct ModelSpec {
  std::string name = "model";
  std::vector<std::string> coordinates;
  std::vector<std::string> aux;
  std::map<std::string, std::string> metadata;
  VariableRegistry registry;
  Expr lagrangian;

  friend bool operator==(const ModelSpec& a, const ModelSpec& b) {
    return a.name == b.name && a.coordinates == b.coordinates && a.aux == b.aux &&
           a.metadata == b.metadata && a.lagrangian == b.lagrangian;
  }
};

// "q<suffix>" -> "p<suffix>", anything else -> "pi_<name>".
std::string momentum_name(std::string_view coordinate);

VariableRegistry model_registry(const std::vector<std::string>& coordinates,
                                const std::vector<std::string>& aux);

// Grammar (whitespace-insensitive, '#' comments):
//   model NAME
//   coords s1 s2 ...
//   aux s ...
//   meta KEY "VALUE"
//   lagrangian: EXPR
// EXPR: rationals, + - * / ^ (nonnegative integer exponent), parentheses,
// symbols, and d(s) for the velocity of s. Division only by constants.
ModelSpec parse_model(std::string_view text);

// Parses a standalone expression against an existing registry.
Expr parse_expr(std::string_view text, const VariableRegistry& reg);

std::string render_model(const ModelSpec& spec);

}  // namespace cmech
