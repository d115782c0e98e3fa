#pragma once

#include <string>
#include <vector>

#include "cmech/fcembed.hpp"

namespace cmech {

struct BRSTComplex {
  VariableRegistry registry;  // embedding registry, then lambda and the ghost sector
  VarId lambda = 0;
  std::vector<VarId> c, pbar, p, cbar, n, b;
  std::vector<Expr> constraints;  // Omega~_a
  std::vector<Expr> gauge;        // chi^a; empty means Psi = 0
  RationalMatrix structure;       // {Omega~_a, H~'} = structure(a,b) Omega~_b
  Expr q;
  Expr psi;
  Expr hm;
  Expr htot;
};

/// Q = C^a Omega~_a + P^a B_a, Psi = Cbar_a chi^a + Pbar_a N^a,
/// H_m = H~' + C^a V_a^b Pbar_b, H_tot = H_m - {Q, Psi}.
/// The ghost term is the one that makes {Q, H_m} vanish under this bracket.
BRSTComplex build_complex(const EmbeddingResult& emb, const std::vector<Expr>& gauge);

struct BRSTIdentity {
  std::string label;
  Expr remainder;
  bool ok() const { return remainder.is_zero(); }
};

std::vector<BRSTIdentity> check_brst_identities(const BRSTComplex& cx);

// delta_B f = -lambda {Q, f}; equals lambda {f, Q} for even f.
Expr brst_transform(const BRSTComplex& cx, const Expr& f);

bool has_ghost_number(const Expr& e, const VariableRegistry& reg, int n);

// Configuration-velocity frame: the Legendre registry (coordinates, momenta,
// velocities) plus the ghost-sector symbols of the complex, by name.
VariableRegistry ghost_frame(const BRSTComplex& cx, const LegendreResult& leg);

struct GhostRelations {
  Substitution momenta;  // every momentum in the constraint -> velocity expression
  Substitution choices;  // applied afterwards, e.g. the choice of N
};

/// Rewrites Omega~_(index+1) in the frame using the supplied momentum relations.
/// Throws MissingRelation for a momentum without a relation.
Expr ghost_extended_constraint(const BRSTComplex& cx, const EmbeddingResult& emb,
                               const VariableRegistry& frame, const GhostRelations& rel,
                               std::size_t index = 1);

}  // namespace cmech
