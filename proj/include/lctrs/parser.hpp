#pragma once

// The .lctrs input format: sort and function declarations, rules with
// optional constraints, `hidden:` and `goal:` directives, `#` comments.
// Variable types are inferred per rule.

#include "lctrs/kernel.hpp"
#include "lctrs/theory.hpp"
#include "lctrs/trs.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lctrs {

struct ParseError {
  int line = 0;
  int col = 0;
  std::string message;

  std::string to_string() const { return std::to_string(line) + ":" + std::to_string(col) + ": " + message; }
};

struct ParseResult {
  std::optional<Lcstrs> system;  // set iff there are no errors
  std::optional<Goal> goal;
  std::vector<ParseError> errors;

  bool ok() const { return system.has_value(); }
};

namespace detail::parse {

enum class Tok { Ident, Int, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1, col = 1;
  std::size_t begin = 0, end = 0;  // byte offsets
};

struct SyntaxError {
  int line, col;
  std::string message;
};

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
inline bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

inline std::vector<Token> lex(std::string_view src, std::vector<ParseError>& errors) {
  static const char* const puncts[] = {"->", "<=", ">=", "!=", "/\\", "\\/", "(", ")", "[", "]", ";", ":", ",",
                                       "+",  "-",  "*",  "<",  ">",   "=",   nullptr};
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
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
    t.col = col;
    t.begin = i;
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else {
      const char* match = nullptr;
      for (const char* const* p = puncts; *p; ++p)
        if (src.substr(i).starts_with(*p)) {
          match = *p;
          break;
        }
      if (!match) {
        errors.push_back({line, col, std::string("unexpected character '") + c + "'"});
        advance(1);
        continue;
      }
      t.kind = Tok::Punct;
      t.text = match;
      advance(t.text.size());
    }
    t.end = i;
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  end.begin = end.end = src.size();
  out.push_back(end);
  return out;
}

inline const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {"sort", "fun", "hidden", "goal", "div", "mod", "not", "neg", "true", "false"};
  return k;
}

// Untyped term syntax.
struct Ast {
  enum class Kind { Name, Int, Bool, Op, App };
  Kind kind;
  std::string name;  // Name
  Integer value;     // Int
  bool truth = false;
  Builtin op = Builtin::None;
  std::shared_ptr<Ast> fn, arg;
  int line = 0, col = 0;
  int ty = -1;  // inferred type, set during inference
};
using AstPtr = std::shared_ptr<Ast>;

inline std::optional<Builtin> operator_of(const std::string& s) {
  static const std::map<std::string, Builtin> ops = {
      {"+", Builtin::Add},  {"-", Builtin::Sub},  {"*", Builtin::Mul},   {"div", Builtin::Div}, {"mod", Builtin::Mod},
      {"<", Builtin::Lt},   {"<=", Builtin::Le},  {">", Builtin::Gt},    {">=", Builtin::Ge},   {"=", Builtin::Eq},
      {"!=", Builtin::Neq}, {"/\\", Builtin::And}, {"\\/", Builtin::Or}, {"not", Builtin::Not}, {"neg", Builtin::Neg}};
  auto it = ops.find(s);
  if (it == ops.end()) return std::nullopt;
  return it->second;
}

// Type variables and unification over an arena.
class Types {
 public:
  int var() { return add({Kind::Var, {}, -1, -1, -1}); }
  int base(const std::string& name) { return add({Kind::Base, name, -1, -1, -1}); }
  int arrow(int a, int b) { return add({Kind::Arrow, {}, a, b, -1}); }
  int from(const Type& t) { return t.is_base() ? base(t.name()) : arrow(from(t.domain()), from(t.codomain())); }

  int find(int i) const {
    while (nodes_[i].kind == Kind::Var && nodes_[i].link >= 0) i = nodes_[i].link;
    return i;
  }

  bool unify(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return true;
    const Node& x = nodes_[a];
    const Node& y = nodes_[b];
    if (x.kind == Kind::Var) return bind(a, b);
    if (y.kind == Kind::Var) return bind(b, a);
    if (x.kind == Kind::Base && y.kind == Kind::Base) return x.name == y.name;
    if (x.kind == Kind::Arrow && y.kind == Kind::Arrow) {
      const int xa = x.a, xb = x.b, ya = y.a, yb = y.b;
      return unify(xa, ya) && unify(xb, yb);
    }
    return false;
  }

  std::string show(int i) const {
    i = find(i);
    const Node& n = nodes_[i];
    switch (n.kind) {
      case Kind::Var: return "?" + std::to_string(i);
      case Kind::Base: return n.name;
      case Kind::Arrow: {
        const Node& d = nodes_[find(n.a)];
        const std::string dom = d.kind == Kind::Arrow ? "(" + show(n.a) + ")" : show(n.a);
        return dom + " -> " + show(n.b);
      }
    }
    return {};
  }

  std::optional<Type> resolve(int i, const Signature& sig) const {
    i = find(i);
    const Node& n = nodes_[i];
    switch (n.kind) {
      case Kind::Var: return std::nullopt;
      case Kind::Base: return sig.sort(n.name);
      case Kind::Arrow: {
        auto a = resolve(n.a, sig), b = resolve(n.b, sig);
        if (!a || !b) return std::nullopt;
        return Type::arrow(*a, *b);
      }
    }
    return std::nullopt;
  }

 private:
  enum class Kind { Var, Base, Arrow };
  struct Node {
    Kind kind;
    std::string name;
    int a, b;
    int link;
  };

  int add(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }
  bool occurs(int v, int t) const {
    t = find(t);
    if (t == v) return true;
    const Node& n = nodes_[t];
    return n.kind == Kind::Arrow && (occurs(v, n.a) || occurs(v, n.b));
  }
  bool bind(int v, int t) {
    if (occurs(v, t)) return false;
    nodes_[v].link = t;
    return true;
  }

  std::vector<Node> nodes_;
};

class Parser {
 public:
  Parser(std::string_view src, const Lcstrs* base) : src_(src) {
    toks_ = lex(src, errors_);
    if (base) system_.signature = base->signature;
  }

  /// A single term over the base signature.
  std::optional<Term> term_only(std::vector<ParseError>& errors) {
    std::optional<Term> out;
    try {
      AstPtr a = expr();
      if (peek().kind != Tok::End) fail(peek(), "unexpected " + describe(peek()) + " after the term");
      Types ty;
      Scope sc;
      infer(*a, ty, sc);
      out = build(*a, ty, sc);
    } catch (const SyntaxError& e) {
      errors_.push_back({e.line, e.col, e.message});
    }
    errors = std::move(errors_);
    if (!errors.empty()) out.reset();
    return out;
  }

  ParseResult run() {
    while (peek().kind != Tok::End) {
      try {
        statement();
      } catch (const SyntaxError& e) {
        errors_.push_back({e.line, e.col, e.message});
        recover();
      }
    }
    ParseResult out;
    out.goal = goal_;
    if (errors_.empty()) {
      for (const auto& d : validate(system_)) {
        const auto [line, col] = d.rule ? rule_pos_[*d.rule] : std::pair<int, int>{1, 1};
        errors_.push_back({line, col, d.message});
      }
    }
    out.errors = std::move(errors_);
    if (out.errors.empty()) out.system = std::move(system_);
    return out;
  }

 private:
  // -------------------------------------------------------------------------
  // Tokens

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool is(const char* text, std::size_t k = 0) const {
    const Token& t = peek(k);
    return t.kind != Tok::End && t.kind != Tok::Int && t.text == text;
  }
  bool accept(const char* text) {
    if (!is(text)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const Token& t, const std::string& message) const { throw SyntaxError{t.line, t.col, message}; }
  static std::string describe(const Token& t) {
    return t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
  }
  void expect(const char* text) {
    if (!accept(text)) fail(peek(), std::string("expected '") + text + "' but found " + describe(peek()));
  }
  std::string name() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) fail(t, "expected a name but found " + describe(t));
    if (keywords().contains(t.text)) fail(t, "'" + t.text + "' is reserved");
    next();
    return t.text;
  }
  void recover() {
    while (peek().kind != Tok::End && !is(";")) next();
    accept(";");
  }

  // -------------------------------------------------------------------------
  // Statements

  void statement() {
    if (accept("sort")) {
      const Token& at = peek();
      const std::string n = name();
      if (n == "Int" || n == "Bool") fail(at, "sort " + n + " is built in");
      system_.signature.add_sort(n);
      expect(";");
      return;
    }
    if (accept("fun")) {
      std::vector<std::pair<Token, std::string>> names;
      do {
        const Token at = peek();
        names.emplace_back(at, name());
      } while (accept(","));
      expect(":");
      const Type t = type();
      expect(";");
      for (const auto& [at, n] : names) {
        try {
          system_.signature.add_symbol(n, t);
        } catch (const TypeError& e) {
          errors_.push_back({at.line, at.col, e.what()});
        }
      }
      return;
    }
    if (is("hidden") && is(":", 1)) {
      next();
      next();
      if (!is(";")) do {
          const Token at = peek();
          const std::string n = name();
          if (!system_.signature.find(n)) fail(at, "hidden symbol " + n + " is not declared");
          system_.hidden.insert(n);
        } while (accept(","));
      expect(";");
      return;
    }
    if (is("goal") && is(":", 1)) {
      next();
      next();
      const Token& at = peek();
      if (accept("termination"))
        goal_ = Goal::Termination;
      else if (accept("public"))
        goal_ = Goal::Public;
      else
        fail(at, "expected 'termination' or 'public' but found " + describe(at));
      expect(";");
      return;
    }
    rule();
  }

  Type type() {
    Type dom = type_atom();
    if (accept("->")) return Type::arrow(dom, type());
    return dom;
  }
  Type type_atom() {
    if (accept("(")) {
      Type t = type();
      expect(")");
      return t;
    }
    const Token& at = peek();
    if (at.kind != Tok::Ident) fail(at, "expected a sort but found " + describe(at));
    next();
    auto s = system_.signature.sort(at.text);
    if (!s) fail(at, "undeclared sort " + at.text);
    return *s;
  }

  // -------------------------------------------------------------------------
  // Terms

  AstPtr make(Ast::Kind k, const Token& at) {
    auto a = std::make_shared<Ast>();
    a->kind = k;
    a->line = at.line;
    a->col = at.col;
    return a;
  }
  AstPtr op_node(Builtin op, const Token& at) {
    auto a = make(Ast::Kind::Op, at);
    a->op = op;
    return a;
  }
  AstPtr apply(AstPtr fn, AstPtr arg) {
    auto a = std::make_shared<Ast>();
    a->kind = Ast::Kind::App;
    a->line = fn->line;
    a->col = fn->col;
    a->fn = std::move(fn);
    a->arg = std::move(arg);
    return a;
  }
  AstPtr binary(Builtin op, const Token& at, AstPtr l, AstPtr r) { return apply(apply(op_node(op, at), l), r); }

  AstPtr expr() { return disjunction(); }

  AstPtr disjunction() {
    AstPtr l = conjunction();
    while (is("\\/")) {
      const Token at = next();
      l = binary(Builtin::Or, at, l, conjunction());
    }
    return l;
  }
  AstPtr conjunction() {
    AstPtr l = negation();
    while (is("/\\")) {
      const Token at = next();
      l = binary(Builtin::And, at, l, negation());
    }
    return l;
  }
  AstPtr negation() {
    if (is("not") && peek().kind == Tok::Ident) {
      const Token at = next();
      return apply(op_node(Builtin::Not, at), negation());
    }
    return comparison();
  }
  AstPtr comparison() {
    AstPtr l = sum();
    for (const char* op : {"<=", ">=", "!=", "<", ">", "="})
      if (is(op)) {
        const Token at = next();
        AstPtr r = sum();
        for (const char* again : {"<=", ">=", "!=", "<", ">", "="})
          if (is(again)) fail(peek(), "comparisons do not chain; add parentheses");
        return binary(*operator_of(op), at, l, r);
      }
    return l;
  }
  AstPtr sum() {
    AstPtr l = product();
    while (is("+") || is("-")) {
      const Token at = next();
      l = binary(*operator_of(at.text), at, l, product());
    }
    return l;
  }
  AstPtr product() {
    AstPtr l = unary();
    while (is("*") || (peek().kind == Tok::Ident && (is("div") || is("mod")))) {
      const Token at = next();
      l = binary(*operator_of(at.text), at, l, unary());
    }
    return l;
  }
  AstPtr unary() {
    if (is("-")) {
      const Token at = next();
      // `-5` with no space is a literal; `- 5` and `-x` are negations.
      if (peek().kind == Tok::Int && peek().begin == at.end) {
        const Token lit = next();
        auto a = make(Ast::Kind::Int, at);
        a->value = -Integer(lit.text);
        return a;
      }
      return apply(op_node(Builtin::Neg, at), unary());
    }
    return application();
  }
  bool atom_start() const {
    const Token& t = peek();
    if (t.kind == Tok::Int) return true;
    if (t.kind == Tok::Ident) return t.text == "true" || t.text == "false" || !keywords().contains(t.text);
    return is("(");
  }
  AstPtr application() {
    if (!atom_start()) fail(peek(), "expected a term but found " + describe(peek()));
    AstPtr t = atom();
    while (atom_start()) t = apply(t, atom());
    return t;
  }
  AstPtr atom() {
    const Token at = next();
    if (at.kind == Tok::Int) {
      auto a = make(Ast::Kind::Int, at);
      a->value = Integer(at.text);
      return a;
    }
    if (at.kind == Tok::Ident) {
      if (at.text == "true" || at.text == "false") {
        auto a = make(Ast::Kind::Bool, at);
        a->truth = at.text == "true";
        return a;
      }
      auto a = make(Ast::Kind::Name, at);
      a->name = at.text;
      return a;
    }
    // "(" : an operator section, a parenthesised term
    if (peek().kind != Tok::Int && peek(1).kind != Tok::End && peek(1).text == ")" && peek(1).kind == Tok::Punct)
      if (auto op = operator_of(peek().text)) {
        const Token o = next();
        next();
        return op_node(*op, o);
      }
    AstPtr t = expr();
    expect(")");
    return t;
  }

  // -------------------------------------------------------------------------
  // Type inference

  struct Scope {
    std::map<std::string, int> vars;
    std::map<std::string, const Ast*> first;  // first occurrence, for messages
    std::vector<std::pair<const Ast*, int>> equalities;  // = and != nodes with their operand type
  };

  int infer(Ast& a, Types& ty, Scope& sc) {
    switch (a.kind) {
      case Ast::Kind::Int: a.ty = ty.base("Int"); break;
      case Ast::Kind::Bool: a.ty = ty.base("Bool"); break;
      case Ast::Kind::Name:
        if (auto f = system_.signature.find(a.name)) {
          a.ty = ty.from(f->type());
        } else {
          auto [it, fresh] = sc.vars.emplace(a.name, -1);
          if (fresh) {
            it->second = ty.var();
            sc.first.emplace(a.name, &a);
          }
          a.ty = it->second;
        }
        break;
      case Ast::Kind::Op:
        if (a.op == Builtin::Eq || a.op == Builtin::Neq) {
          const int v = ty.var();
          a.ty = ty.arrow(v, ty.arrow(v, ty.base("Bool")));
          sc.equalities.emplace_back(&a, v);
        } else {
          a.ty = ty.from(theory::builtin(a.op).type());
        }
        break;
      case Ast::Kind::App: {
        const int f = infer(*a.fn, ty, sc);
        const int x = infer(*a.arg, ty, sc);
        const int r = ty.var();
        if (!ty.unify(f, ty.arrow(x, r)))
          throw SyntaxError{a.arg->line, a.arg->col,
                            "type mismatch: cannot apply a term of type " + ty.show(f) + " to an argument of type " +
                                ty.show(x)};
        a.ty = r;
        break;
      }
    }
    return a.ty;
  }

  Term build(const Ast& a, const Types& ty, const Scope& sc) {
    switch (a.kind) {
      case Ast::Kind::Int: return theory::num(a.value);
      case Ast::Kind::Bool: return theory::boolean(a.truth);
      case Ast::Kind::Name: {
        if (auto f = system_.signature.find(a.name)) return Term::sym(*f);
        auto t = ty.resolve(sc.vars.at(a.name), system_.signature);
        if (!t) {
          const Ast* at = sc.first.at(a.name);
          throw SyntaxError{at->line, at->col, "cannot infer the type of variable " + a.name};
        }
        return Term::var(a.name, *t);
      }
      case Ast::Kind::Op: {
        Type operand = Type::int_sort();
        for (const auto& [node, v] : sc.equalities)
          if (node == &a) {
            if (auto t = ty.resolve(v, system_.signature)) operand = *t;
            if (!(operand == Type::int_sort()) && !(operand == Type::bool_sort()))
              throw SyntaxError{a.line, a.col,
                                std::string(a.op == Builtin::Eq ? "=" : "!=") + " compares Int or Bool values, not " +
                                    operand.text()};
          }
        return Term::sym(theory::builtin(a.op, operand));
      }
      case Ast::Kind::App: return Term::app(build(*a.fn, ty, sc), build(*a.arg, ty, sc));
    }
    return {};
  }

  void rule() {
    const Token start = peek();
    AstPtr lhs = expr();
    expect("->");
    AstPtr rhs = expr();
    AstPtr cond;
    if (accept("[")) {
      cond = expr();
      expect("]");
    }
    expect(";");

    Types ty;
    Scope sc;
    const int tl = infer(*lhs, ty, sc);
    const int tr = infer(*rhs, ty, sc);
    if (!ty.unify(tl, tr))
      throw SyntaxError{rhs->line, rhs->col,
                        "lhs has type " + ty.show(tl) + " but rhs has type " + ty.show(tr)};
    if (cond) {
      const int tc = infer(*cond, ty, sc);
      if (!ty.unify(tc, ty.base("Bool")))
        throw SyntaxError{cond->line, cond->col, "constraint has type " + ty.show(tc) + ", not Bool"};
    }
    Rule r{build(*lhs, ty, sc), build(*rhs, ty, sc), cond ? build(*cond, ty, sc) : theory::truth()};
    system_.rules.push_back(std::move(r));
    rule_pos_.emplace_back(start.line, start.col);
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<ParseError> errors_;
  Lcstrs system_;
  std::optional<Goal> goal_;
  std::vector<std::pair<int, int>> rule_pos_;
};

}  // namespace detail::parse

/// Parses and validates a system. With `base`, its sorts and symbols are
/// visible, as for a file extending it.
inline ParseResult parse(std::string_view text, const Lcstrs* base = nullptr) {
  return detail::parse::Parser(text, base).run();
}

/// Parses one term against the symbols of `system`; undeclared names are
/// variables whose types are inferred.
inline std::optional<Term> parse_term(std::string_view text, const Lcstrs& system,
                                      std::vector<ParseError>* errors = nullptr) {
  std::vector<ParseError> errs;
  auto t = detail::parse::Parser(text, &system).term_only(errs);
  if (errors) *errors = std::move(errs);
  return t;
}

/// Source text that parses back to the same system.
inline std::string to_source(const Lcstrs& system, std::optional<Goal> goal = std::nullopt) {
  std::string out;
  for (const auto& s : system.signature.sorts())
    if (!s.is_theory_sort()) out += "sort " + s.name() + ";\n";
  for (const auto& f : system.signature.symbols()) out += "fun " + f.name() + " : " + f.type().text() + ";\n";
  if (!system.hidden.empty()) {
    out += "hidden:";
    bool first = true;
    for (const auto& h : system.hidden) {
      out += (first ? " " : ", ") + h;
      first = false;
    }
    out += ";\n";
  }
  if (goal) out += std::string("goal: ") + to_string(*goal) + ";\n";
  for (const auto& r : system.rules) out += to_string(r) + ";\n";
  return out;
}

}  // namespace lctrs
