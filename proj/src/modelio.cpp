#include "cmech/modelio.hpp"

#include <cctype>
#include <optional>
#include <set>

#include "cmech/error.hpp"

namespace cmech {

std::string momentum_name(std::string_view coordinate) {
  if (!coordinate.empty() && coordinate.front() == 'q') {
    return "p" + std::string(coordinate.substr(1));
  }
  return "pi_" + std::string(coordinate);
}

VariableRegistry model_registry(const std::vector<std::string>& coordinates,
                                const std::vector<std::string>& aux) {
  VariableRegistry reg;
  std::vector<VarId> positions;
  for (const auto& c : coordinates) positions.push_back(reg.add(c, VarKind::Coordinate));
  for (const auto& a : aux) positions.push_back(reg.add(a, VarKind::AuxCoordinate));
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const bool is_aux = i >= coordinates.size();
    const VarId p = reg.add(momentum_name(reg[positions[i]].name),
                            is_aux ? VarKind::AuxMomentum : VarKind::Momentum);
    reg.pair(positions[i], p);
  }
  for (VarId q : positions) reg.add_velocity(q);
  return reg;
}

namespace {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

const std::set<std::string, std::less<>> kKeywords = {"model", "coords", "aux", "meta", "lagrangian"};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Number;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (c == '"') {
      std::string value;
      advance(1);
      bool closed = false;
      while (i < src.size()) {
        if (src[i] == '"') {
          closed = true;
          advance(1);
          break;
        }
        if (src[i] == '\\' && i + 1 < src.size()) {
          value += src[i + 1];
          advance(2);
          continue;
        }
        if (src[i] == '\n') break;
        value += src[i];
        advance(1);
      }
      if (!closed) throw ParseError(ErrorCode::Syntax, "unterminated string", t.line, t.column);
      t.kind = Tok::String;
      t.text = std::move(value);
    } else if (std::string_view("+-*/^():").find(c) != std::string_view::npos) {
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(ErrorCode::Syntax, std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

struct TermInfo {
  Expr value;
  int line;
  int column;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const VariableRegistry* reg) : toks_(std::move(tokens)), reg_(reg) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }
  bool at_end() const { return peek().kind == Tok::End; }
  bool at_punct(char c) const { return peek().kind == Tok::Punct && peek().text[0] == c; }
  bool at_keyword() const { return peek().kind == Tok::Ident && kKeywords.count(peek().text) != 0; }

  [[noreturn]] void fail(const std::string& msg, ErrorCode code = ErrorCode::Syntax) const {
    throw ParseError(code, msg, peek().line, peek().column);
  }

  void expect_punct(char c) {
    if (!at_punct(c)) fail(std::string("expected '") + c + "'");
    next();
  }

  std::string expect_ident() {
    if (peek().kind != Tok::Ident) fail("expected identifier");
    return next().text;
  }

  void set_registry(const VariableRegistry* reg) { reg_ = reg; }
  void restrict_to_configuration(bool on) { configuration_only_ = on; }

  Expr sum(std::vector<TermInfo>* terms = nullptr) {
    Expr acc;
    bool first = true;
    while (true) {
      const Token start = peek();
      bool negate = false;
      if (at_punct('+') || at_punct('-')) {
        negate = next().text[0] == '-';
      } else if (!first) {
        break;
      }
      Expr t = product();
      if (negate) t = -t;
      if (terms) terms->push_back({t, start.line, start.column});
      acc += t;
      first = false;
    }
    return acc;
  }

 private:
  Expr product() {
    Expr acc = unary();
    while (at_punct('*') || at_punct('/')) {
      const bool divide = next().text[0] == '/';
      const Token at = peek();
      Expr rhs = unary();
      if (!divide) {
        acc *= rhs;
        continue;
      }
      auto c = rhs.as_constant();
      if (!c || *c == 0) {
        throw ParseError(ErrorCode::Syntax, "division by a non-constant or zero", at.line, at.column);
      }
      acc *= Expr(Rational(1 / *c));
    }
    return acc;
  }

  Expr unary() {
    if (at_punct('-')) {
      next();
      return -unary();
    }
    if (at_punct('+')) {
      next();
      return unary();
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (at_punct('^')) {
      next();
      if (peek().kind != Tok::Number) fail("exponent must be a nonnegative integer");
      const std::string digits = next().text;
      if (digits.size() > 4) fail("exponent too large");
      base = base.pow(static_cast<unsigned>(std::stoul(digits)));
    }
    return base;
  }

  Expr primary() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      next();
      return Expr(Rational(mpz_class(t.text)));
    }
    if (at_punct('(')) {
      next();
      Expr e = sum();
      expect_punct(')');
      return e;
    }
    if (t.kind == Tok::Ident) {
      if (kKeywords.count(t.text) != 0) fail("unexpected keyword '" + t.text + "'");
      const Token name_tok = next();
      if (name_tok.text == "d" && at_punct('(')) {
        next();
        const Token arg = peek();
        const std::string base = expect_ident();
        expect_punct(')');
        return lookup("d(" + base + ")", arg);
      }
      return lookup(name_tok.text, name_tok);
    }
    fail(at_end() ? "unexpected end of input" : "unexpected '" + t.text + "'");
  }

  Expr lookup(const std::string& name, const Token& at) const {
    auto id = reg_->find(name);
    if (!id) throw ParseError(ErrorCode::UnknownSymbol, "unknown symbol '" + name + "'", at.line, at.column);
    if (configuration_only_) {
      const VarKind k = (*reg_)[*id].kind;
      if (k != VarKind::Coordinate && k != VarKind::AuxCoordinate && k != VarKind::Velocity) {
        throw ParseError(ErrorCode::UnknownSymbol,
                         "'" + name + "' is not a coordinate or velocity", at.line, at.column);
      }
    }
    return Expr::var(*reg_, *id);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const VariableRegistry* reg_;
  bool configuration_only_ = false;
};

unsigned velocity_degree(const Expr& e, const VariableRegistry& reg) {
  unsigned best = 0;
  for (const auto& [m, c] : e.terms()) {
    unsigned d = 0;
    for (const auto& [v, k] : m.even) {
      if (reg[v].kind == VarKind::Velocity) d += k;
    }
    best = std::max(best, d);
  }
  return best;
}

}  // namespace

ModelSpec parse_model(std::string_view text) {
  Parser p(tokenize(text), nullptr);
  ModelSpec spec;
  bool named = false;
  bool have_lagrangian = false;
  std::set<std::string> declared;
  auto declare = [&](std::vector<std::string>& into, const char* what) {
    if (have_lagrangian) p.fail(std::string(what) + " after lagrangian");
    if (p.peek().kind != Tok::Ident || p.at_keyword()) p.fail(std::string("expected ") + what + " names");
    while (p.peek().kind == Tok::Ident && !p.at_keyword()) {
      const Token& t = p.peek();
      if (t.text == "d") p.fail("'d' is reserved for velocities");
      if (!declared.insert(t.text).second) {
        p.fail("duplicate coordinate '" + t.text + "'", ErrorCode::DuplicateCoordinate);
      }
      into.push_back(p.next().text);
    }
  };

  while (!p.at_end()) {
    if (!p.at_keyword()) p.fail("expected a statement keyword");
    const std::string kw = p.next().text;
    if (kw == "model") {
      if (named) p.fail("model name given twice");
      spec.name = p.expect_ident();
      named = true;
    } else if (kw == "coords") {
      declare(spec.coordinates, "coordinate");
    } else if (kw == "aux") {
      declare(spec.aux, "auxiliary coordinate");
    } else if (kw == "meta") {
      const std::string key = p.expect_ident();
      if (p.peek().kind != Tok::String) p.fail("expected quoted metadata value");
      spec.metadata[key] = p.next().text;
    } else {
      if (have_lagrangian) p.fail("lagrangian given twice");
      p.expect_punct(':');
      const Token start = p.peek();
      try {
        spec.registry = model_registry(spec.coordinates, spec.aux);
      } catch (const Error& e) {
        throw ParseError(ErrorCode::DuplicateCoordinate, e.what(), start.line, start.column);
      }
      p.set_registry(&spec.registry);
      p.restrict_to_configuration(true);
      std::vector<TermInfo> terms;
      spec.lagrangian = p.sum(&terms);
      for (const auto& t : terms) {
        if (velocity_degree(t.value, spec.registry) > 2) {
          throw ParseError(ErrorCode::VelocityDegree, "term of degree > 2 in the velocities", t.line,
                           t.column);
        }
      }
      if (velocity_degree(spec.lagrangian, spec.registry) > 2) {
        throw ParseError(ErrorCode::VelocityDegree, "lagrangian of degree > 2 in the velocities",
                         start.line, start.column);
      }
      have_lagrangian = true;
      if (!p.at_end() && !p.at_keyword()) p.fail("unexpected '" + p.peek().text + "'");
    }
  }
  if (!have_lagrangian) p.fail("missing lagrangian statement");
  return spec;
}

Expr parse_expr(std::string_view text, const VariableRegistry& reg) {
  Parser p(tokenize(text), &reg);
  Expr e = p.sum();
  if (!p.at_end()) p.fail("unexpected '" + p.peek().text + "'");
  return e;
}

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string render_model(const ModelSpec& spec) {
  std::string out = "model " + spec.name + "\n";
  out += "coords";
  for (const auto& c : spec.coordinates) out += " " + c;
  out += "\n";
  if (!spec.aux.empty()) {
    out += "aux";
    for (const auto& a : spec.aux) out += " " + a;
    out += "\n";
  }
  for (const auto& [k, v] : spec.metadata) out += "meta " + k + " " + quoted(v) + "\n";
  out += "lagrangian: " + render(spec.lagrangian, spec.registry) + "\n";
  return out;
}

}  // namespace cmech
