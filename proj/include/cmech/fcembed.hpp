#pragma once

#include <string>
#include <vector>

#include "cmech/diracchain.hpp"
#include "cmech/legendre.hpp"

namespace cmech {

struct EmbeddingResult {
  VariableRegistry registry;  // chain registry plus the auxiliary pairs
  std::vector<std::pair<VarId, VarId>> aux_pairs;
  std::vector<VarId> phase_space;  // original coordinates then momenta
  std::vector<Expr> original;      // Omega_a
  std::vector<Expr> fc_constraints;
  // Columns follow (theta1, pi1, theta2, pi2, ...).
  RationalMatrix x;
  Substitution tilde_map;  // original phase-space variable -> gauge-invariant extension
  Expr h0;
  Expr total_h;  // the chain's H_T, for the vanishing-auxiliary limit
  Expr fc_hamiltonian;
  Expr improvement;  // sum_i pi_i * tilde Omega_(2i)
  Expr fc_hamiltonian_prime;
};

/// Adds k auxiliary pairs for 2k second-class constraints and builds strongly
/// involutive Omega~ = Omega + X phi, with Delta + X omega X^T = 0. X = M D where
/// Delta = M J M^T comes from symplectic Gram-Schmidt and D = diag(1,-1,...), so
/// a canonical Delta gives Omega1 + theta, Omega2 - pi.
EmbeddingResult bft_embed(const ConstraintChain& chain);

struct IdentityCheck {
  std::string label;
  Expr expected;
  Expr actual;
  bool ok = false;
};

struct GaussReport {
  std::vector<Expr> brackets;  // {Omega~_a, H~'}
  std::vector<IdentityCheck> checks;
  std::vector<IdentityCheck> limit_checks;  // auxiliaries -> 0 against {Omega_a, H_T}, weakly
  bool ok() const;
};

GaussReport check_gauss_algebra(const EmbeddingResult& emb);
GaussReport check_gauss_algebra(const EmbeddingResult& emb, const Expr& hamiltonian);

struct RoundTripReport {
  LegendreResult legendre;
  ConstraintChain chain;
  std::vector<IdentityCheck> momenta;  // (a)
  IdentityCheck primary;               // (b)
  IdentityCheck secondary;             // (c), up to a rational factor
  bool first_class = false;            // (d)
  std::size_t free_multipliers = 0;
  IdentityCheck hamiltonian;           // (e), reduced modulo the round-trip chain
  bool ok() const;
};

/// Legendre and Dirac analysis of the extended Lagrangian, compared with the
/// embedding. `expected_momenta` maps momentum names to their expected
/// definitions, written in the extended model's registry.
RoundTripReport roundtrip_lagrangian(const ModelSpec& extended, const EmbeddingResult& emb,
                                     const std::map<std::string, Expr>& expected_momenta);

struct GaugeTable {
  VariableRegistry registry;  // embedding registry plus eps1, eps2, ...
  std::vector<VarId> parameters;
  std::vector<std::pair<VarId, Expr>> variations;  // delta f = {f, eps_a Omega~_a}
};

GaugeTable gauge_transformations(const EmbeddingResult& emb);

}  // namespace cmech
