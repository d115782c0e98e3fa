#pragma once

#include <doctest.h>

#include "cmech/bundled_models.hpp"
#include "cmech/error.hpp"
#include "cmech/verify.hpp"

#define CHECK_EXPR(reg, got, want)                                                                        \
  CHECK_MESSAGE((got) == (want), cmech::render((got), (reg)) << "  !=  " << cmech::render((want), (reg)))

#define CHECK_THROWS_CODE(expr, ec)                                          \
  do {                                                                       \
    bool thrown_ = false;                                                    \
    try {                                                                    \
      (void)(expr);                                                          \
    } catch (const cmech::Error& e_) {                                       \
      thrown_ = true;                                                        \
      CHECK_MESSAGE(e_.code() == (ec), "wrong error code: " << e_.what());   \
    }                                                                        \
    CHECK_MESSAGE(thrown_, "expected an error from " #expr);                 \
  } while (0)

namespace fixture {

inline cmech::Expr P(const cmech::VariableRegistry& reg, const char* text) { return cmech::parse_expr(text, reg); }

struct Nhcs {
  cmech::ModelSpec spec = cmech::parse_model(cmech::bundled::kNhcs);
  cmech::LegendreResult leg = cmech::analyze(spec);
  cmech::ConstraintChain chain = cmech::run_chain(leg);
};

inline const Nhcs& nhcs() {
  static const Nhcs n;
  return n;
}

inline const cmech::EmbeddingResult& embedding() {
  static const cmech::EmbeddingResult e = cmech::bft_embed(nhcs().chain);
  return e;
}

inline const cmech::ModelSpec& extended() {
  static const cmech::ModelSpec s = cmech::parse_model(cmech::bundled::kNhcsExtended);
  return s;
}

inline cmech::ModelSpec free_particle() { return cmech::parse_model(cmech::bundled::kFreeParticle); }

}  // namespace fixture
