#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cmech/registry.hpp"

namespace cmech {

using Rational = mpq_class;

// Power product of even variables times an ordered product of distinct odd
// variables. Both lists are kept sorted by variable id, so the odd sequence is
// already in registry order; any sign from reordering lives in the coefficient.
struct Monomial {
  std::vector<std::pair<VarId, std::uint32_t>> even;
  std::vector<VarId> odd;

  unsigned degree() const;
  std::uint32_t exponent(VarId v) const;
  bool contains(VarId v) const { return exponent(v) > 0; }
  Parity parity() const { return (odd.size() % 2 == 0) ? Parity::Even : Parity::Odd; }
  bool is_unit() const { return even.empty() && odd.empty(); }

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

// Graded lexicographic comparison by variable id: total degree first, then the
// exponent vector with lower ids most significant. Returns <0, 0, >0.
int compare(const Monomial& a, const Monomial& b);

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }
};

// Product of two monomials; sign is +1, -1, or 0 when an odd variable repeats.
std::pair<Monomial, int> multiply(const Monomial& a, const Monomial& b);

/// Exact polynomial in a supercommutative algebra with rational coefficients.
///
/// The term map is the canonical form: no zero coefficients, monomials in
/// increasing graded-lex order. Two expressions are equal iff their maps are.
class Expr {
 public:
  using Terms = std::map<Monomial, Rational, MonomialLess>;

  Expr() = default;
  Expr(const Rational& c);  // NOLINT(google-explicit-constructor)
  Expr(long c) : Expr(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  Expr(int c) : Expr(Rational(c)) {}   // NOLINT(google-explicit-constructor)

  static Expr var(const VariableRegistry& reg, VarId id);
  static Expr var(const VariableRegistry& reg, std::string_view name);
  static Expr term(const Monomial& m, const Rational& c);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::optional<Rational> as_constant() const;
  Rational constant_term() const;
  Rational coefficient(const Monomial& m) const;

  // Parity of a homogeneous expression; zero counts as even, mixed is nullopt.
  std::optional<Parity> parity() const;
  Expr part(Parity p) const;

  unsigned degree() const;
  std::set<VarId> variables() const;
  bool contains(VarId v) const;

  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  Expr& operator*=(const Expr& o);
  Expr& operator*=(const Rational& c);
  Expr operator-() const;
  friend Expr operator+(Expr a, const Expr& b) { return a += b; }
  friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
  friend Expr operator*(const Expr& a, const Expr& b);

  Expr pow(unsigned n) const;

  friend bool operator==(const Expr& a, const Expr& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  // Internal: accumulate c*m into the canonical map.
  void add_term(const Monomial& m, const Rational& c);

 private:
  Terms terms_;
};

// Stable text form: "a/b" rationals, "^" powers, odd factors in registry order,
// terms in decreasing monomial order. Parsed back exactly by modelio.
std::string render(const Expr& e, const VariableRegistry& reg);

int ghost_number(const Monomial& m, const VariableRegistry& reg);

}  // namespace cmech
