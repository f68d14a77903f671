#pragma once

// Sorts, simple types, function symbols, applicative terms and substitutions.
//
// Everything here is an immutable value: copies share structure through
// shared_ptr<const ...>, so terms may be passed freely between threads.

#include "lctrs/integer.hpp"

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lctrs {

class TypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Types

class Type {
 public:
  Type() = default;

  static Type base(std::string name, bool theory = false) {
    auto n = std::make_shared<Node>();
    n->name = std::move(name);
    n->theory = theory;
    n->text = n->name;
    return Type(std::move(n));
  }
  static Type arrow(const Type& from, const Type& to) {
    auto n = std::make_shared<Node>();
    n->from = from.node_;
    n->to = to.node_;
    n->theory = false;
    n->text = (from.is_base() ? from.text() : "(" + from.text() + ")") + " -> " + to.text();
    return Type(std::move(n));
  }
  /// A1 -> ... -> An -> result
  static Type arrows(std::span<const Type> args, const Type& result) {
    Type t = result;
    for (auto it = args.rbegin(); it != args.rend(); ++it) t = arrow(*it, t);
    return t;
  }

  static const Type& int_sort() {
    static const Type t = base("Int", true);
    return t;
  }
  static const Type& bool_sort() {
    static const Type t = base("Bool", true);
    return t;
  }
  /// The sort of marked terms.
  static const Type& dp_sort() {
    static const Type t = base("dp", false);
    return t;
  }

  bool valid() const { return node_ != nullptr; }
  bool is_base() const { return node_->from == nullptr; }
  bool is_arrow() const { return !is_base(); }
  const std::string& name() const { return node_->name; }
  bool is_theory_sort() const { return is_base() && node_->theory; }
  Type domain() const { return Type(node_->from); }
  Type codomain() const { return Type(node_->to); }
  const std::string& text() const { return node_->text; }

  /// Domains along the spine.
  std::vector<Type> arg_types() const {
    std::vector<Type> out;
    for (const Node* t = node_.get(); t->from; t = t->to.get()) out.push_back(Type(t->from));
    return out;
  }
  std::size_t arity() const {
    std::size_t n = 0;
    for (const Node* t = node_.get(); t->from; t = t->to.get()) ++n;
    return n;
  }
  /// The final codomain, always a sort.
  Type result_sort() const {
    std::shared_ptr<const Node> t = node_;
    while (t->from) t = t->to;
    return Type(t);
  }
  /// Every domain along the spine and the result are theory sorts.
  bool is_theory_type() const {
    for (const Node* t = node_.get();; t = t->to.get()) {
      if (!t->from) return t->theory;
      if (t->from->from || !t->from->theory) return false;
    }
  }
  /// Replace the final sort, keeping the domains.
  Type with_result(const Type& sort) const { return arrows(arg_types(), sort); }

  friend bool operator==(const Type& a, const Type& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    return a.node_->text == b.node_->text && a.node_->theory == b.node_->theory;
  }
  friend std::strong_ordering operator<=>(const Type& a, const Type& b) {
    if (!a.node_ || !b.node_) return a.node_ <=> b.node_;
    return a.node_->text <=> b.node_->text;
  }

 private:
  struct Node {
    std::string name;
    bool theory = false;
    std::shared_ptr<const Node> from, to;  // null for sorts
    std::string text;
  };
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Function symbols

enum class SymbolKind { Plain, Theory, Marked };

/// Interpreted theory symbols. `None` for plain and marked symbols.
enum class Builtin {
  None,
  IntValue,
  BoolValue,
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  Neg,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Neq,
  And,
  Or,
  Not,
};

class Symbol {
 public:
  Symbol() = default;

  static Symbol plain(std::string name, Type type) {
    return Symbol(std::make_shared<Data>(Data{std::move(name), std::move(type), SymbolKind::Plain, Builtin::None, {}, false}));
  }
  static Symbol theory(std::string name, Type type, Builtin op) {
    if (!type.is_theory_type()) throw TypeError("theory symbol " + name + " needs a theory type, got " + type.text());
    return Symbol(std::make_shared<Data>(Data{std::move(name), std::move(type), SymbolKind::Theory, op, {}, false}));
  }
  static Symbol int_value(const Integer& n) {
    return Symbol(std::make_shared<Data>(Data{n.str(), Type::int_sort(), SymbolKind::Theory, Builtin::IntValue, n, false}));
  }
  static Symbol bool_value(bool b) {
    return Symbol(std::make_shared<Data>(Data{b ? "true" : "false", Type::bool_sort(), SymbolKind::Theory, Builtin::BoolValue, {}, b}));
  }
  /// f♯ : A1 -> ... -> An -> dp for f : A1 -> ... -> An -> B.
  static Symbol marked(const Symbol& f) {
    return Symbol(std::make_shared<Data>(Data{f.name(), f.type().with_result(Type::dp_sort()), SymbolKind::Marked, Builtin::None, {}, false}));
  }

  bool valid() const { return d_ != nullptr; }
  const std::string& name() const { return d_->name; }
  const Type& type() const { return d_->type; }
  SymbolKind kind() const { return d_->kind; }
  Builtin op() const { return d_->op; }
  bool is_theory() const { return d_->kind == SymbolKind::Theory; }
  bool is_marked() const { return d_->kind == SymbolKind::Marked; }
  bool is_value() const { return d_->op == Builtin::IntValue || d_->op == Builtin::BoolValue; }
  /// Theory symbols that are not values.
  bool is_calculation() const { return is_theory() && !is_value(); }
  const Integer& int_value() const { return d_->ival; }
  bool bool_value() const { return d_->bval; }

  /// Display name; marked symbols carry a trailing ♯.
  std::string display() const { return is_marked() ? d_->name + "♯" : d_->name; }

  friend bool operator==(const Symbol& a, const Symbol& b) {
    if (a.d_ == b.d_) return true;
    if (!a.d_ || !b.d_) return false;
    return a.d_->kind == b.d_->kind && a.d_->name == b.d_->name && a.d_->type == b.d_->type;
  }
  friend std::strong_ordering operator<=>(const Symbol& a, const Symbol& b) {
    if (auto c = a.d_->kind <=> b.d_->kind; c != 0) return c;
    if (auto c = a.d_->name <=> b.d_->name; c != 0) return c;
    return a.d_->type <=> b.d_->type;
  }

 private:
  struct Data {
    std::string name;
    Type type;
    SymbolKind kind;
    Builtin op;
    Integer ival;
    bool bval;
  };
  explicit Symbol(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

// ---------------------------------------------------------------------------
// Variables

/// Identified by name and type.
struct Variable {
  std::string name;
  Type type;

  friend bool operator==(const Variable&, const Variable&) = default;
  friend std::strong_ordering operator<=>(const Variable& a, const Variable& b) {
    if (auto c = a.name <=> b.name; c != 0) return c;
    return a.type <=> b.type;
  }
};

// ---------------------------------------------------------------------------
// Terms

class Term {
 public:
  enum class Kind { Symbol, Variable, Application };

  Term() = default;

  static Term sym(const Symbol& f) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Symbol;
    n->symbol = f;
    n->type = f.type();
    n->hash = std::hash<std::string>{}(f.name()) * 31 + static_cast<std::size_t>(f.kind());
    n->size = 1;
    return Term(std::move(n));
  }
  static Term var(const Variable& x) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->variable = x;
    n->type = x.type;
    n->hash = std::hash<std::string>{}(x.name) * 131 + 7;
    n->size = 1;
    return Term(std::move(n));
  }
  static Term var(std::string name, Type type) { return var(Variable{std::move(name), std::move(type)}); }

  /// Application; throws TypeError on a domain mismatch.
  static Term app(const Term& fn, const Term& arg) {
    const Type& ft = fn.type();
    if (!ft.is_arrow())
      throw TypeError("cannot apply " + fn.debug_string() + " of sort " + ft.text());
    if (!(ft.domain() == arg.type()))
      throw TypeError("argument " + arg.debug_string() + " has type " + arg.type().text() + " but " +
                      fn.debug_string() + " expects " + ft.domain().text());
    auto n = std::make_shared<Node>();
    n->kind = Kind::Application;
    n->left = fn.n_;
    n->right = arg.n_;
    n->type = ft.codomain();
    n->hash = fn.hash() * 1000003u ^ (arg.hash() + 0x9e3779b97f4a7c15ull);
    n->size = fn.size() + arg.size();
    return Term(std::move(n));
  }
  static Term apply(const Term& head, std::span<const Term> args) {
    Term t = head;
    for (const auto& a : args) t = app(t, a);
    return t;
  }
  static Term apply(const Term& head, std::initializer_list<Term> args) {
    return apply(head, std::span<const Term>(args.begin(), args.size()));
  }
  static Term apply(const Symbol& f, std::initializer_list<Term> args) { return apply(sym(f), args); }

  bool valid() const { return n_ != nullptr; }
  Kind kind() const { return n_->kind; }
  bool is_symbol() const { return n_->kind == Kind::Symbol; }
  bool is_var() const { return n_->kind == Kind::Variable; }
  bool is_app() const { return n_->kind == Kind::Application; }
  const Symbol& symbol() const { return n_->symbol; }
  const Variable& variable() const { return n_->variable; }
  Term left() const { return Term(n_->left); }
  Term right() const { return Term(n_->right); }
  const Type& type() const { return n_->type; }
  std::size_t hash() const { return n_->hash; }
  std::size_t size() const { return n_->size; }

  /// Head of the spine: a symbol or a variable.
  Term head() const {
    std::shared_ptr<const Node> t = n_;
    while (t->kind == Kind::Application) t = t->left;
    return Term(t);
  }
  std::size_t num_args() const {
    std::size_t k = 0;
    for (const Node* t = n_.get(); t->kind == Kind::Application; t = t->left.get()) ++k;
    return k;
  }
  std::vector<Term> args() const {
    std::vector<Term> out(num_args());
    const Node* t = n_.get();
    for (std::size_t i = out.size(); i > 0; --i) {
      out[i - 1] = Term(t->right);
      t = t->left.get();
    }
    return out;
  }
  /// i-th argument, 1-based.
  Term arg(std::size_t i) const { return args().at(i - 1); }
  bool has_symbol_head() const { return head().is_symbol(); }
  bool is_value() const { return is_symbol() && symbol().is_value(); }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.n_ == b.n_) return true;
    if (!a.n_ || !b.n_) return false;
    if (a.n_->hash != b.n_->hash || a.n_->kind != b.n_->kind) return false;
    switch (a.n_->kind) {
      case Kind::Symbol: return a.n_->symbol == b.n_->symbol;
      case Kind::Variable: return a.n_->variable == b.n_->variable;
      case Kind::Application: return Term(a.n_->left) == Term(b.n_->left) && Term(a.n_->right) == Term(b.n_->right);
    }
    return false;
  }

  std::string debug_string() const;

 private:
  struct Node {
    Kind kind = Kind::Symbol;
    Symbol symbol;
    Variable variable;
    std::shared_ptr<const Node> left, right;
    Type type;
    std::size_t hash = 0;
    std::size_t size = 0;
  };
  explicit Term(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

/// Total structural order, used for deterministic containers.
inline std::strong_ordering compare(const Term& a, const Term& b) {
  if (a.kind() != b.kind()) return a.kind() <=> b.kind();
  switch (a.kind()) {
    case Term::Kind::Symbol: return a.symbol() <=> b.symbol();
    case Term::Kind::Variable: return a.variable() <=> b.variable();
    case Term::Kind::Application:
      if (auto c = compare(a.left(), b.left()); c != 0) return c;
      return compare(a.right(), b.right());
  }
  return std::strong_ordering::equal;
}

struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return compare(a, b) < 0; }
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

// ---------------------------------------------------------------------------
// Printing
//
// Output is re-parseable by the frontend grammar except for marked symbols,
// which only occur in dependency pairs.

namespace detail {

inline const char* infix_name(Builtin op) {
  switch (op) {
    case Builtin::Add: return "+";
    case Builtin::Sub: return "-";
    case Builtin::Mul: return "*";
    case Builtin::Div: return "div";
    case Builtin::Mod: return "mod";
    case Builtin::Lt: return "<";
    case Builtin::Le: return "<=";
    case Builtin::Gt: return ">";
    case Builtin::Ge: return ">=";
    case Builtin::Eq: return "=";
    case Builtin::Neq: return "!=";
    case Builtin::And: return "/\\";
    case Builtin::Or: return "\\/";
    default: return nullptr;
  }
}

// Binding strength; larger binds tighter.
inline int infix_prec(Builtin op) {
  switch (op) {
    case Builtin::Or: return 1;
    case Builtin::And: return 2;
    case Builtin::Lt:
    case Builtin::Le:
    case Builtin::Gt:
    case Builtin::Ge:
    case Builtin::Eq:
    case Builtin::Neq: return 4;
    case Builtin::Add:
    case Builtin::Sub: return 5;
    case Builtin::Mul:
    case Builtin::Div:
    case Builtin::Mod: return 6;
    default: return 0;
  }
}

constexpr int kNotPrec = 3;
constexpr int kNegPrec = 7;
constexpr int kAppPrec = 8;
constexpr int kAtomPrec = 9;

inline void print(const Term& t, int ctx, std::string& out);

inline void print_symbol(const Symbol& f, std::string& out) {
  if (f.op() == Builtin::Neg) {
    out += "(neg)";
    return;
  }
  if (const char* op = infix_name(f.op()); op && f.is_theory()) {
    out += "(";
    out += op;
    out += ")";
    return;
  }
  if (f.op() == Builtin::Not) {
    out += "(not)";
    return;
  }
  out += f.display();
}

inline void print(const Term& t, int ctx, std::string& out) {
  if (t.is_var()) {
    out += t.variable().name;
    return;
  }
  if (t.is_symbol()) {
    const Symbol& f = t.symbol();
    if (f.op() == Builtin::IntValue && f.int_value() < 0 && ctx > 0) {
      out += "(" + f.name() + ")";
      return;
    }
    print_symbol(f, out);
    return;
  }
  const Term h = t.head();
  const auto args = t.args();
  if (h.is_symbol() && h.symbol().is_theory()) {
    const Builtin op = h.symbol().op();
    if (const char* name = infix_name(op); name && args.size() == 2) {
      const int p = infix_prec(op);
      const bool chain = op == Builtin::Add || op == Builtin::Sub || op == Builtin::Mul ||
                         op == Builtin::Div || op == Builtin::Mod || op == Builtin::And || op == Builtin::Or;
      const bool paren = ctx > p;
      if (paren) out += "(";
      print(args[0], chain ? p : p + 1, out);
      out += " ";
      out += name;
      out += " ";
      print(args[1], p + 1, out);
      if (paren) out += ")";
      return;
    }
    if (op == Builtin::Neg && args.size() == 1) {
      const bool paren = ctx > kNegPrec;
      if (paren) out += "(";
      out += "-";
      const Term& a = args[0];
      if (a.is_var() || (a.is_symbol() && !a.symbol().is_value())) {
        print(a, kAtomPrec, out);
      } else {
        out += "(";
        print(a, 0, out);
        out += ")";
      }
      if (paren) out += ")";
      return;
    }
    if (op == Builtin::Not && args.size() == 1) {
      const bool paren = ctx > kNotPrec;
      if (paren) out += "(";
      out += "not ";
      print(args[0], kNegPrec, out);
      if (paren) out += ")";
      return;
    }
  }
  const bool paren = ctx > kAppPrec;
  if (paren) out += "(";
  print(h, kAtomPrec, out);
  for (const auto& a : args) {
    out += " ";
    print(a, kAtomPrec, out);
  }
  if (paren) out += ")";
}

}  // namespace detail

inline std::string to_string(const Term& t) {
  std::string out;
  detail::print(t, 0, out);
  return out;
}

inline std::string Term::debug_string() const { return valid() ? to_string(*this) : "<null>"; }

// ---------------------------------------------------------------------------
// Variables, substitutions, subterms

using VarSet = std::set<Variable>;
using Substitution = std::map<Variable, Term>;

inline void collect_vars(const Term& t, VarSet& out) {
  switch (t.kind()) {
    case Term::Kind::Symbol: return;
    case Term::Kind::Variable: out.insert(t.variable()); return;
    case Term::Kind::Application:
      collect_vars(t.left(), out);
      collect_vars(t.right(), out);
      return;
  }
}

inline VarSet free_vars(const Term& t) {
  VarSet out;
  collect_vars(t, out);
  return out;
}

inline bool is_ground(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Symbol: return true;
    case Term::Kind::Variable: return false;
    case Term::Kind::Application: return is_ground(t.left()) && is_ground(t.right());
  }
  return true;
}

/// Homomorphic application; variables outside the domain are kept.
inline Term apply_subst(const Term& t, const Substitution& sigma) {
  if (sigma.empty()) return t;
  switch (t.kind()) {
    case Term::Kind::Symbol: return t;
    case Term::Kind::Variable: {
      auto it = sigma.find(t.variable());
      return it == sigma.end() ? t : it->second;
    }
    case Term::Kind::Application: {
      Term l = apply_subst(t.left(), sigma);
      Term r = apply_subst(t.right(), sigma);
      if (l == t.left() && r == t.right()) return t;
      return Term::app(l, r);
    }
  }
  return t;
}

/// (first ; second)(x) = apply_subst(first(x), second), extended by second on fresh keys.
inline Substitution compose(const Substitution& first, const Substitution& second) {
  Substitution out;
  for (const auto& [x, t] : first) out.emplace(x, apply_subst(t, second));
  for (const auto& [x, t] : second) out.emplace(x, t);  // emplace keeps existing keys
  return out;
}

/// Throws TypeError when some binding changes the type.
inline void check_type_preserving(const Substitution& sigma) {
  for (const auto& [x, t] : sigma)
    if (!(x.type == t.type()))
      throw TypeError("substitution maps " + x.name + " : " + x.type.text() + " to a term of type " + t.type().text());
}

/// All u with t ⊵ u, whole term first, duplicates removed.
inline std::vector<Term> subterms(const Term& t) {
  std::vector<Term> all;
  all.push_back(t);
  const auto args = t.args();
  for (const auto& a : args) {
    auto sub = subterms(a);
    all.insert(all.end(), sub.begin(), sub.end());
  }
  std::vector<Term> out;
  for (auto& s : all) {
    bool seen = false;
    for (const auto& o : out)
      if (o == s) {
        seen = true;
        break;
      }
    if (!seen) out.push_back(std::move(s));
  }
  return out;
}

/// s ⊵ t
inline bool is_subterm(const Term& s, const Term& t) {
  if (s == t) return true;
  if (!s.is_app()) return false;
  for (const auto& a : s.args())
    if (is_subterm(a, t)) return true;
  return false;
}

/// s ▷ t
inline bool is_proper_subterm(const Term& s, const Term& t) { return !(s == t) && is_subterm(s, t); }

/// Every subterm is a variable or has a function symbol at its head.
inline bool is_pattern(const Term& t) {
  if (t.is_var()) return true;
  if (!t.head().is_symbol()) return false;
  for (const auto& a : t.args())
    if (!is_pattern(a)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Positions
//
// A position is a path of 1-based argument indices through the head/argument
// view of a term. `prefix` optionally selects the head applied to only its
// first k arguments at the end of the path (the non-maximally-applied
// subterms, which rewrite rules can still match).

struct Position {
  std::vector<std::size_t> path;
  std::optional<std::size_t> prefix;

  friend bool operator==(const Position&, const Position&) = default;

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (i) s += ".";
      s += std::to_string(path[i]);
    }
    if (s.empty()) s = "ε";  // ε
    if (prefix) s += "@" + std::to_string(*prefix);
    return s;
  }
};

inline Term head_prefix(const Term& t, std::size_t k) {
  const std::size_t n = t.num_args();
  Term p = t;
  for (std::size_t i = n; i > k; --i) p = p.left();
  return p;
}

inline Term subterm_at(const Term& t, const Position& pos) {
  Term cur = t;
  for (std::size_t i : pos.path) cur = cur.arg(i);
  if (pos.prefix) cur = head_prefix(cur, *pos.prefix);
  return cur;
}

namespace detail {
inline Term replace_prefix(const Term& t, std::size_t k, const Term& repl) {
  const auto args = t.args();
  Term out = repl;
  for (std::size_t i = k; i < args.size(); ++i) out = Term::app(out, args[i]);
  return out;
}
inline Term replace_path(const Term& t, std::span<const std::size_t> path, const std::optional<std::size_t>& prefix,
                         const Term& repl) {
  if (path.empty()) return prefix ? replace_prefix(t, *prefix, repl) : repl;
  auto args = t.args();
  const std::size_t i = path.front();
  args.at(i - 1) = replace_path(args[i - 1], path.subspan(1), prefix, repl);
  return Term::apply(t.head(), args);
}
}  // namespace detail

inline Term replace_at(const Term& t, const Position& pos, const Term& repl) {
  return detail::replace_path(t, pos.path, pos.prefix, repl);
}

/// Leftmost-outermost: the term, its proper head prefixes (longest first),
/// then the positions inside each argument from left to right.
inline std::vector<Position> positions(const Term& t) {
  std::vector<Position> out;
  out.push_back({});
  const std::size_t n = t.num_args();
  for (std::size_t k = n; k-- > 0;) out.push_back(Position{{}, k});
  const auto args = t.args();
  for (std::size_t i = 0; i < n; ++i) {
    for (auto p : positions(args[i])) {
      p.path.insert(p.path.begin(), i + 1);
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace lctrs
