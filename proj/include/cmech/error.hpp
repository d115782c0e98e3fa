#pragma once

#include <stdexcept>
#include <string>

namespace cmech {

enum class ErrorCode {
  UnregisteredSymbol,
  VelocityInBracket,
  MissingConjugate,
  ParityMismatch,
  NonlinearConstraint,
  DependentConstraints,
  InconsistentConstraints,
  DuplicateSymbol,
  InvalidRegistry,
  Syntax,
  UnknownSymbol,
  VelocityDegree,
  DuplicateCoordinate,
  UnsupportedModel,
  IterationCap,
  Inconsistent,
  NotSecondClass,
  NoFixing,
  NonConstantDelta,
  OddConstraintCount,
  MissingRelation,
  NonFinite,
  OffSolutionFamily,
  Usage,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Syntax-level failure with a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, const std::string& msg, int line, int column)
      : Error(code, std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace cmech
