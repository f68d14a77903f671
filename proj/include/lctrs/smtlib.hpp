#pragma once

// SMT-LIB 2 text for logical constraints, and a small s-expression reader
// for solver responses.

#include "lctrs/kernel.hpp"
#include "lctrs/theory.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lctrs::smtlib {

/// Assigns each constraint variable a distinct SMT-LIB symbol.
class NameTable {
 public:
  const std::string& name(const Variable& x) {
    if (auto it = names_.find(x); it != names_.end()) return it->second;
    std::string base = x.name;
    for (char& c : base)
      if (c == '|' || c == '\\') c = '_';
    std::string candidate = base;
    for (int i = 1; used_.contains(candidate); ++i) candidate = base + "!" + std::to_string(i);
    used_.insert(candidate);
    order_.push_back(x);
    return names_.emplace(x, candidate).first->second;
  }
  /// Variables in order of first use.
  const std::vector<Variable>& variables() const { return order_; }
  std::optional<Variable> lookup(const std::string& smt_name) const {
    for (const auto& [x, n] : names_)
      if (n == smt_name) return x;
    return std::nullopt;
  }

 private:
  std::map<Variable, std::string> names_;
  std::set<std::string> used_;
  std::vector<Variable> order_;
};

inline std::string sort_name(const Type& t) {
  if (t == Type::int_sort()) return "Int";
  if (t == Type::bool_sort()) return "Bool";
  throw std::invalid_argument("no SMT-LIB sort for " + t.text());
}

inline std::string quote(const std::string& name) { return "|" + name + "|"; }

inline std::string integer_literal(const Integer& n) {
  if (n < 0) return "(- " + Integer(-n).str() + ")";
  return n.str();
}

/// Throws std::invalid_argument for terms outside the built-in theory.
inline std::string print(const Term& t, NameTable& names) {
  if (t.is_var()) {
    sort_name(t.type());
    return quote(names.name(t.variable()));
  }
  if (t.is_symbol()) {
    const Symbol& f = t.symbol();
    if (f.op() == Builtin::IntValue) return integer_literal(f.int_value());
    if (f.op() == Builtin::BoolValue) return f.bool_value() ? "true" : "false";
    throw std::invalid_argument("unapplied symbol in constraint: " + f.name());
  }
  const Term h = t.head();
  if (!h.is_symbol() || !h.symbol().is_theory())
    throw std::invalid_argument("not a theory term: " + to_string(t));
  const auto args = t.args();
  if (args.size() != h.symbol().type().arity())
    throw std::invalid_argument("partially applied theory symbol: " + to_string(t));
  const char* op = nullptr;
  switch (h.symbol().op()) {
    case Builtin::Add: op = "+"; break;
    case Builtin::Sub: op = "-"; break;
    case Builtin::Mul: op = "*"; break;
    case Builtin::Div: op = "div"; break;
    case Builtin::Mod: op = "mod"; break;
    case Builtin::Neg: op = "-"; break;
    case Builtin::Lt: op = "<"; break;
    case Builtin::Le: op = "<="; break;
    case Builtin::Gt: op = ">"; break;
    case Builtin::Ge: op = ">="; break;
    case Builtin::Eq: op = "="; break;
    case Builtin::Neq: op = "distinct"; break;
    case Builtin::And: op = "and"; break;
    case Builtin::Or: op = "or"; break;
    case Builtin::Not: op = "not"; break;
    default: throw std::invalid_argument("unsupported symbol " + h.symbol().name());
  }
  std::string out = "(";
  out += op;
  for (const auto& a : args) {
    out += " ";
    out += print(a, names);
  }
  out += ")";
  return out;
}

/// True when no product, quotient or remainder has two non-constant operands.
inline bool is_linear(const Term& t) {
  if (!t.is_app()) return true;
  const Builtin op = theory::op_of(t);
  const auto args = t.args();
  if ((op == Builtin::Mul || op == Builtin::Div || op == Builtin::Mod) && args.size() == 2) {
    if (!is_ground(args[1]) && (op != Builtin::Mul || !is_ground(args[0]))) return false;
  }
  for (const auto& a : args)
    if (!is_linear(a)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// S-expressions

struct SExpr {
  std::string atom;  // empty for lists
  std::vector<SExpr> list;
  bool is_atom() const { return !atom.empty(); }
};

inline SExpr parse_sexpr(const std::string& text, std::size_t& pos) {
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  skip();
  if (pos >= text.size()) throw std::runtime_error("unexpected end of s-expression");
  if (text[pos] == '(') {
    ++pos;
    SExpr e;
    for (;;) {
      skip();
      if (pos >= text.size()) throw std::runtime_error("unbalanced s-expression");
      if (text[pos] == ')') {
        ++pos;
        return e;
      }
      e.list.push_back(parse_sexpr(text, pos));
    }
  }
  if (text[pos] == ')') throw std::runtime_error("unexpected ')'");
  SExpr e;
  if (text[pos] == '|') {
    auto end = text.find('|', pos + 1);
    if (end == std::string::npos) throw std::runtime_error("unterminated quoted symbol");
    e.atom = text.substr(pos, end - pos + 1);
    pos = end + 1;
    return e;
  }
  if (text[pos] == '"') {
    auto end = pos + 1;
    while (end < text.size() && !(text[end] == '"' && (end + 1 >= text.size() || text[end + 1] != '"')))
      end += (text[end] == '"') ? 2 : 1;
    e.atom = text.substr(pos, end - pos + 1);
    pos = end + 1;
    return e;
  }
  auto start = pos;
  while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) && text[pos] != '(' && text[pos] != ')')
    ++pos;
  e.atom = text.substr(start, pos - start);
  return e;
}

inline SExpr parse_sexpr(const std::string& text) {
  std::size_t pos = 0;
  return parse_sexpr(text, pos);
}

/// Parenthesis balance of a chunk of solver output, ignoring quoted text.
inline int paren_balance(const std::string& text) {
  int depth = 0;
  bool in_bar = false, in_str = false;
  for (char c : text) {
    if (in_bar) {
      in_bar = c != '|';
    } else if (in_str) {
      in_str = c != '"';
    } else if (c == '|') {
      in_bar = true;
    } else if (c == '"') {
      in_str = true;
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      --depth;
    }
  }
  return depth;
}

/// Reads a model value: integer literal, (- n), true/false.
inline std::optional<Value> read_value(const SExpr& e) {
  if (e.is_atom()) {
    if (e.atom == "true") return Value(true);
    if (e.atom == "false") return Value(false);
    try {
      return Value(Integer(e.atom));
    } catch (...) {
      return std::nullopt;
    }
  }
  if (e.list.size() == 2 && e.list[0].atom == "-") {
    auto inner = read_value(e.list[1]);
    if (inner && std::holds_alternative<Integer>(*inner)) return Value(Integer(-std::get<Integer>(*inner)));
  }
  return std::nullopt;
}

inline std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '|' && s.back() == '|') return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace lctrs::smtlib
