#include "core/theory.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace logikon {

const Connective* Theory::find_connective(std::string_view name) const {
  for (const Connective& c : connectives) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const Axiom* Theory::find_axiom(std::string_view name) const {
  for (const Axiom& a : axioms) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

bool same_structure(const Theory& a, const Theory& b) {
  if (a.name != b.name || a.connectives != b.connectives ||
      a.axioms.size() != b.axioms.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.axioms.size(); ++i) {
    const Axiom& x = a.axioms[i];
    const Axiom& y = b.axioms[i];
    if (x.name != y.name || x.context_size != y.context_size || !(x.lhs == y.lhs) ||
        !(x.rhs == y.rhs)) {
      return false;
    }
  }
  return true;
}

namespace {

enum class Tok { ident, nat, lbrace, rbrace, lparen, rparen, comma, semi, colon, equals, end };

const char* describe(Tok t) {
  switch (t) {
    case Tok::ident: return "identifier";
    case Tok::nat: return "number";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::comma: return "','";
    case Tok::semi: return "';'";
    case Tok::colon: return "':'";
    case Tok::equals: return "'='";
    case Tok::end: return "end of input";
  }
  return "token";
}

struct Token {
  Tok kind;
  std::string text;
  SourceLocation at;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    SourceLocation at{line_, col_};
    if (pos_ >= src_.size()) return {Tok::end, "", at};
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
              src_[pos_] == '\'')) {
        advance();
      }
      return {Tok::ident, std::string(src_.substr(start, pos_ - start)), at};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        advance();
      }
      return {Tok::nat, std::string(src_.substr(start, pos_ - start)), at};
    }
    Tok kind;
    switch (c) {
      case '{': kind = Tok::lbrace; break;
      case '}': kind = Tok::rbrace; break;
      case '(': kind = Tok::lparen; break;
      case ')': kind = Tok::rparen; break;
      case ',': kind = Tok::comma; break;
      case ';': kind = Tok::semi; break;
      case ':': kind = Tok::colon; break;
      case '=': kind = Tok::equals; break;
      default:
        throw Error(ErrorCode::syntax, at,
                    std::string("unexpected character '") + c + "'");
    }
    advance();
    return {kind, std::string(1, c), at};
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// Surface syntax before names are resolved against the signature.
struct RawTerm {
  std::string name;
  SourceLocation at;
  bool call = false;
  std::vector<RawTerm> args;
};

struct RawAxiom {
  std::string name;
  SourceLocation at;
  RawTerm lhs;
  RawTerm rhs;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { cur_ = lex_.next(); }

  Token expect(Tok kind) {
    if (cur_.kind != kind) {
      throw Error(ErrorCode::syntax, cur_.at,
                  std::string("expected ") + describe(kind) + ", found " +
                      (cur_.kind == Tok::end ? std::string("end of input")
                                             : "'" + cur_.text + "'"));
    }
    Token t = std::move(cur_);
    cur_ = lex_.next();
    return t;
  }

  bool at(Tok kind) const { return cur_.kind == kind; }
  const Token& current() const { return cur_; }

  RawTerm term() {
    Token id = expect(Tok::ident);
    RawTerm t{id.text, id.at, false, {}};
    if (at(Tok::lparen)) {
      expect(Tok::lparen);
      t.call = true;
      t.args.push_back(term());
      while (at(Tok::comma)) {
        expect(Tok::comma);
        t.args.push_back(term());
      }
      expect(Tok::rparen);
    }
    return t;
  }

 private:
  Lexer lex_;
  Token cur_;
};

class Resolver {
 public:
  Resolver(const std::vector<Connective>& sig, std::vector<std::string> vars)
      : sig_(sig), vars_(std::move(vars)) {}

  Term resolve(const RawTerm& raw) {
    const Connective* c = nullptr;
    for (const Connective& k : sig_) {
      if (k.name == raw.name) c = &k;
    }
    if (raw.call) {
      if (c == nullptr) {
        throw Error(ErrorCode::undeclared_connective, raw.at,
                    "undeclared connective '" + raw.name + "'");
      }
      if (c->arity != raw.args.size()) {
        throw Error(ErrorCode::arity_mismatch, raw.at,
                    "connective '" + raw.name + "' expects " + std::to_string(c->arity) +
                        " argument(s), got " + std::to_string(raw.args.size()));
      }
      std::vector<Term> args;
      args.reserve(raw.args.size());
      for (const RawTerm& a : raw.args) args.push_back(resolve(a));
      return Term::apply(raw.name, std::move(args));
    }
    if (c != nullptr) {
      if (c->arity != 0) {
        throw Error(ErrorCode::arity_mismatch, raw.at,
                    "connective '" + raw.name + "' expects " + std::to_string(c->arity) +
                        " argument(s), got 0");
      }
      return Term::apply(raw.name, {});
    }
    auto it = std::find(vars_.begin(), vars_.end(), raw.name);
    if (it != vars_.end()) return Term::variable(static_cast<std::size_t>(it - vars_.begin()));
    vars_.push_back(raw.name);
    return Term::variable(vars_.size() - 1);
  }

  std::vector<std::string>& variables() { return vars_; }

 private:
  const std::vector<Connective>& sig_;
  std::vector<std::string> vars_;
};

}  // namespace

Theory parse_theory(std::string_view source) {
  Parser p(source);
  Theory theory;
  const Token kw = p.expect(Tok::ident);
  if (kw.text != "theory") {
    throw Error(ErrorCode::syntax, kw.at, "expected 'theory', found '" + kw.text + "'");
  }
  theory.name = p.expect(Tok::ident).text;
  p.expect(Tok::lbrace);

  std::vector<RawAxiom> raw_axioms;
  std::set<std::string> axiom_names;
  while (!p.at(Tok::rbrace)) {
    if (p.at(Tok::end)) p.expect(Tok::rbrace);
    const Token item = p.expect(Tok::ident);
    if (item.text == "op") {
      const Token name = p.expect(Tok::ident);
      p.expect(Tok::colon);
      const Token arity = p.expect(Tok::nat);
      p.expect(Tok::semi);
      if (theory.find_connective(name.text) != nullptr) {
        throw Error(ErrorCode::duplicate_name, name.at,
                    "connective '" + name.text + "' declared twice");
      }
      std::size_t n = 0;
      try {
        n = std::stoul(arity.text);
      } catch (const std::exception&) {
        throw Error(ErrorCode::syntax, arity.at, "arity out of range");
      }
      theory.connectives.push_back({name.text, n});
    } else if (item.text == "axiom") {
      const Token name = p.expect(Tok::ident);
      p.expect(Tok::colon);
      RawTerm lhs = p.term();
      p.expect(Tok::equals);
      RawTerm rhs = p.term();
      p.expect(Tok::semi);
      if (!axiom_names.insert(name.text).second) {
        throw Error(ErrorCode::duplicate_name, name.at,
                    "axiom '" + name.text + "' declared twice");
      }
      raw_axioms.push_back({name.text, name.at, std::move(lhs), std::move(rhs)});
    } else {
      throw Error(ErrorCode::syntax, item.at,
                  "expected 'op', 'axiom' or '}', found '" + item.text + "'");
    }
  }
  p.expect(Tok::rbrace);
  if (!p.at(Tok::end)) {
    throw Error(ErrorCode::syntax, p.current().at, "expected end of input after '}'");
  }

  for (RawAxiom& raw : raw_axioms) {
    Resolver r(theory.connectives, {});
    Axiom ax;
    ax.name = raw.name;
    ax.location = raw.at;
    ax.lhs = r.resolve(raw.lhs);
    ax.rhs = r.resolve(raw.rhs);
    ax.variable_names = std::move(r.variables());
    ax.context_size = ax.variable_names.size();
    theory.axioms.push_back(std::move(ax));
  }
  return theory;
}

ParsedExpression parse_expression(std::string_view source, const Theory& theory,
                                  std::vector<std::string> variables) {
  Parser p(source);
  RawTerm raw = p.term();
  if (!p.at(Tok::end)) {
    throw Error(ErrorCode::syntax, p.current().at,
                "unexpected '" + p.current().text + "' after expression");
  }
  Resolver r(theory.connectives, std::move(variables));
  Term t = r.resolve(raw);
  return {std::move(t), std::move(r.variables())};
}

std::string check_term(const Term& t, const Theory& theory, std::size_t context_size) {
  if (t.is_variable()) {
    if (t.var_index() >= context_size) {
      return "variable index " + std::to_string(t.var_index()) + " outside context of size " +
             std::to_string(context_size);
    }
    return {};
  }
  const Connective* c = theory.find_connective(t.connective());
  if (c == nullptr) return "undeclared connective '" + t.connective() + "'";
  if (c->arity != t.args().size()) {
    return "connective '" + c->name + "' expects " + std::to_string(c->arity) +
           " argument(s), got " + std::to_string(t.args().size());
  }
  for (const Term& a : t.args()) {
    std::string msg = check_term(a, theory, context_size);
    if (!msg.empty()) return msg;
  }
  return {};
}

std::vector<Diagnostic> validate_theory(const Theory& theory) {
  std::vector<Diagnostic> out;
  std::set<std::string> seen;
  for (const Connective& c : theory.connectives) {
    if (!seen.insert(c.name).second) {
      out.push_back({c.name, {}, "connective '" + c.name + "' declared more than once"});
    }
  }
  std::set<std::string> axiom_names;
  for (const Axiom& a : theory.axioms) {
    if (!axiom_names.insert(a.name).second) {
      out.push_back({a.name, a.location, "axiom '" + a.name + "' declared more than once"});
    }
    for (const Term* side : {&a.lhs, &a.rhs}) {
      std::string msg = check_term(*side, theory, a.context_size);
      if (!msg.empty()) {
        out.push_back({a.name, a.location,
                       std::string(side == &a.lhs ? "left" : "right") + " side: " + msg});
      }
    }
  }
  return out;
}

std::string print_theory(const Theory& theory) {
  std::string out(kDslVersionComment);
  out += "\ntheory " + theory.name + " {\n";
  for (const Connective& c : theory.connectives) {
    out += "  op " + c.name + ":" + std::to_string(c.arity) + ";\n";
  }
  for (const Axiom& a : theory.axioms) {
    // Fall back to generated names when the source spelling is missing or
    // would be read back as a connective.
    std::vector<std::string> names = a.variable_names;
    names.resize(a.context_size);
    std::set<std::string> used;
    for (std::size_t i = 0; i < names.size(); ++i) {
      std::string& n = names[i];
      if (n.empty() || theory.find_connective(n) != nullptr || used.count(n) != 0) {
        n = default_variable_name(i);
        while (theory.find_connective(n) != nullptr || used.count(n) != 0) n += '_';
      }
      used.insert(n);
    }
    out += "  axiom " + a.name + ": " + to_string(a.lhs, names) + " = " +
           to_string(a.rhs, names) + ";\n";
  }
  out += "}\n";
  return out;
}

Theory with_axioms(const Theory& theory, std::span<const std::string> names) {
  Theory out{theory.name, theory.connectives, {}};
  for (const std::string& n : names) {
    const Axiom* a = theory.find_axiom(n);
    if (a == nullptr) throw Error(ErrorCode::invalid_argument, "unknown axiom '" + n + "'");
    out.axioms.push_back(*a);
  }
  return out;
}

}  // namespace logikon
