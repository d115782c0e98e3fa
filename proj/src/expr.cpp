#include "cmech/expr.hpp"

#include <algorithm>

#include "cmech/error.hpp"

namespace cmech {

unsigned Monomial::degree() const {
  unsigned d = static_cast<unsigned>(odd.size());
  for (const auto& [v, e] : even) d += e;
  return d;
}

std::uint32_t Monomial::exponent(VarId v) const {
  for (const auto& [id, e] : even) {
    if (id == v) return e;
  }
  return std::binary_search(odd.begin(), odd.end(), v) ? 1U : 0U;
}

namespace {

// Merged (id, exponent) view; odd variables carry exponent 1.
std::vector<std::pair<VarId, std::uint32_t>> merged(const Monomial& m) {
  std::vector<std::pair<VarId, std::uint32_t>> out;
  out.reserve(m.even.size() + m.odd.size());
  auto ie = m.even.begin();
  auto io = m.odd.begin();
  while (ie != m.even.end() || io != m.odd.end()) {
    if (io == m.odd.end() || (ie != m.even.end() && ie->first < *io)) {
      out.push_back(*ie++);
    } else {
      out.emplace_back(*io++, 1U);
    }
  }
  return out;
}

}  // namespace

int compare(const Monomial& a, const Monomial& b) {
  const unsigned da = a.degree();
  const unsigned db = b.degree();
  if (da != db) return da < db ? -1 : 1;
  const auto ma = merged(a);
  const auto mb = merged(b);
  std::size_t i = 0;
  for (; i < ma.size() && i < mb.size(); ++i) {
    if (ma[i].first != mb[i].first) return ma[i].first < mb[i].first ? 1 : -1;
    if (ma[i].second != mb[i].second) return ma[i].second < mb[i].second ? -1 : 1;
  }
  if (ma.size() == mb.size()) return 0;
  return i < ma.size() ? 1 : -1;
}

std::pair<Monomial, int> multiply(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.even.reserve(a.even.size() + b.even.size());
  auto ia = a.even.begin();
  auto ib = b.even.begin();
  while (ia != a.even.end() || ib != b.even.end()) {
    if (ib == b.even.end() || (ia != a.even.end() && ia->first < ib->first)) {
      r.even.push_back(*ia++);
    } else if (ia == a.even.end() || ib->first < ia->first) {
      r.even.push_back(*ib++);
    } else {
      r.even.emplace_back(ia->first, ia->second + ib->second);
      ++ia;
      ++ib;
    }
  }
  // Odd merge: moving an element of b past the remaining elements of a costs
  // one transposition each.
  int swaps = 0;
  r.odd.reserve(a.odd.size() + b.odd.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.odd.size() || j < b.odd.size()) {
    if (j == b.odd.size() || (i < a.odd.size() && a.odd[i] < b.odd[j])) {
      r.odd.push_back(a.odd[i++]);
    } else if (i == a.odd.size() || b.odd[j] < a.odd[i]) {
      swaps += static_cast<int>(a.odd.size() - i);
      r.odd.push_back(b.odd[j++]);
    } else {
      return {Monomial{}, 0};
    }
  }
  return {std::move(r), (swaps % 2 == 0) ? 1 : -1};
}

Expr::Expr(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial{}, c);
}

Expr Expr::var(const VariableRegistry& reg, VarId id) {
  if (!reg.contains(id)) {
    throw Error(ErrorCode::UnregisteredSymbol, "unregistered variable id " + std::to_string(id));
  }
  Monomial m;
  if (reg[id].parity == Parity::Odd) {
    m.odd.push_back(id);
  } else {
    m.even.emplace_back(id, 1U);
  }
  return term(m, 1);
}

Expr Expr::var(const VariableRegistry& reg, std::string_view name) {
  return var(reg, reg.id(name));
}

Expr Expr::term(const Monomial& m, const Rational& c) {
  Expr e;
  e.add_term(m, c);
  return e;
}

void Expr::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

bool Expr::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_unit());
}

std::optional<Rational> Expr::as_constant() const {
  if (!is_constant()) return std::nullopt;
  return constant_term();
}

Rational Expr::constant_term() const { return coefficient(Monomial{}); }

Rational Expr::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

std::optional<Parity> Expr::parity() const {
  std::optional<Parity> p;
  for (const auto& [m, c] : terms_) {
    if (!p) {
      p = m.parity();
    } else if (*p != m.parity()) {
      return std::nullopt;
    }
  }
  return p.value_or(Parity::Even);
}

Expr Expr::part(Parity p) const {
  Expr out;
  for (const auto& [m, c] : terms_) {
    if (m.parity() == p) out.terms_.emplace(m, c);
  }
  return out;
}

unsigned Expr::degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

std::set<VarId> Expr::variables() const {
  std::set<VarId> out;
  for (const auto& [m, c] : terms_) {
    for (const auto& [v, e] : m.even) out.insert(v);
    out.insert(m.odd.begin(), m.odd.end());
  }
  return out;
}

bool Expr::contains(VarId v) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [v](const auto& t) { return t.first.contains(v); });
}

Expr& Expr::operator+=(const Expr& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Expr& Expr::operator-=(const Expr& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Expr operator*(const Expr& a, const Expr& b) {
  Expr out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      auto [m, sign] = multiply(ma, mb);
      if (sign == 0) continue;
      Rational c = ca * cb;
      if (sign < 0) c = -c;
      out.add_term(m, c);
    }
  }
  return out;
}

Expr& Expr::operator*=(const Expr& o) {
  *this = *this * o;
  return *this;
}

Expr& Expr::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, coef] : terms_) coef *= c;
  return *this;
}

Expr Expr::operator-() const {
  Expr out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Expr Expr::pow(unsigned n) const {
  Expr result(1);
  Expr base = *this;
  while (n > 0) {
    if (n & 1U) result *= base;
    n >>= 1U;
    if (n > 0) base *= base;
  }
  return result;
}

namespace {

std::string rational_text(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string monomial_text(const Monomial& m, const VariableRegistry& reg) {
  std::string out;
  for (const auto& [v, e] : merged(m)) {
    if (!reg.contains(v)) {
      throw Error(ErrorCode::UnregisteredSymbol, "unregistered variable id " + std::to_string(v));
    }
    if (!out.empty()) out += '*';
    out += reg[v].name;
    if (e > 1) out += "^" + std::to_string(e);
  }
  return out;
}

}  // namespace

std::string render(const Expr& e, const VariableRegistry& reg) {
  if (e.is_zero()) return "0";
  std::string out;
  for (auto it = e.terms().rbegin(); it != e.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    const bool negative = c < 0;
    const Rational mag = negative ? Rational(-c) : c;
    if (out.empty()) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    if (m.is_unit()) {
      out += rational_text(mag);
    } else if (mag == 1) {
      out += monomial_text(m, reg);
    } else {
      out += rational_text(mag) + "*" + monomial_text(m, reg);
    }
  }
  return out;
}

int ghost_number(const Monomial& m, const VariableRegistry& reg) {
  int g = 0;
  for (const auto& [v, e] : m.even) g += reg[v].ghost_number * static_cast<int>(e);
  for (VarId v : m.odd) g += reg[v].ghost_number;
  return g;
}

}  // namespace cmech
