#pragma once

// The built-in theory of integers and booleans: symbols, interpretation,
// calculation steps and κ-normal forms.
//
// `div` and `mod` follow the SMT-LIB convention (0 <= m mod n < |n|), so the
// evaluator and an external solver agree on every value. Division by zero is
// not evaluated: such an application is simply not a calculation redex.

#include "lctrs/integer.hpp"
#include "lctrs/kernel.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lctrs {

using Value = std::variant<Integer, bool>;

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace theory {

/// The symbol for `op`. Equality and disequality take the operand sort;
/// everything else has a fixed type.
inline Symbol builtin(Builtin op, const Type& operand = Type::int_sort()) {
  const Type& I = Type::int_sort();
  const Type& B = Type::bool_sort();
  auto bin = [](const Type& a, const Type& r) { return Type::arrow(a, Type::arrow(a, r)); };
  switch (op) {
    case Builtin::Add: return Symbol::theory("+", bin(I, I), op);
    case Builtin::Sub: return Symbol::theory("-", bin(I, I), op);
    case Builtin::Mul: return Symbol::theory("*", bin(I, I), op);
    case Builtin::Div: return Symbol::theory("div", bin(I, I), op);
    case Builtin::Mod: return Symbol::theory("mod", bin(I, I), op);
    case Builtin::Neg: return Symbol::theory("neg", Type::arrow(I, I), op);
    case Builtin::Lt: return Symbol::theory("<", bin(I, B), op);
    case Builtin::Le: return Symbol::theory("<=", bin(I, B), op);
    case Builtin::Gt: return Symbol::theory(">", bin(I, B), op);
    case Builtin::Ge: return Symbol::theory(">=", bin(I, B), op);
    case Builtin::Eq: return Symbol::theory("=", bin(operand, B), op);
    case Builtin::Neq: return Symbol::theory("!=", bin(operand, B), op);
    case Builtin::And: return Symbol::theory("/\\", bin(B, B), op);
    case Builtin::Or: return Symbol::theory("\\/", bin(B, B), op);
    case Builtin::Not: return Symbol::theory("not", Type::arrow(B, B), op);
    default: throw std::invalid_argument("not an operator symbol");
  }
}

inline Term num(const Integer& n) { return Term::sym(Symbol::int_value(n)); }
inline Term num(long long n) { return num(Integer(n)); }
inline Term boolean(bool b) { return Term::sym(Symbol::bool_value(b)); }
inline Term truth() { return boolean(true); }

inline Term binop(Builtin op, const Term& a, const Term& b) {
  return Term::apply(Term::sym(builtin(op, a.type())), {a, b});
}
inline Term add(const Term& a, const Term& b) { return binop(Builtin::Add, a, b); }
inline Term sub(const Term& a, const Term& b) { return binop(Builtin::Sub, a, b); }
inline Term mul(const Term& a, const Term& b) { return binop(Builtin::Mul, a, b); }
inline Term div(const Term& a, const Term& b) { return binop(Builtin::Div, a, b); }
inline Term mod(const Term& a, const Term& b) { return binop(Builtin::Mod, a, b); }
inline Term neg(const Term& a) { return Term::app(Term::sym(builtin(Builtin::Neg)), a); }
inline Term lt(const Term& a, const Term& b) { return binop(Builtin::Lt, a, b); }
inline Term le(const Term& a, const Term& b) { return binop(Builtin::Le, a, b); }
inline Term gt(const Term& a, const Term& b) { return binop(Builtin::Gt, a, b); }
inline Term ge(const Term& a, const Term& b) { return binop(Builtin::Ge, a, b); }
inline Term eq(const Term& a, const Term& b) { return binop(Builtin::Eq, a, b); }
inline Term neq(const Term& a, const Term& b) { return binop(Builtin::Neq, a, b); }
inline Term lnot(const Term& a) { return Term::app(Term::sym(builtin(Builtin::Not)), a); }

inline bool is_true(const Term& t) { return t.is_symbol() && t.symbol().op() == Builtin::BoolValue && t.symbol().bool_value(); }
inline bool is_false(const Term& t) { return t.is_symbol() && t.symbol().op() == Builtin::BoolValue && !t.symbol().bool_value(); }

/// Head operator of a fully applied builtin, or None.
inline Builtin op_of(const Term& t) {
  const Term h = t.head();
  if (!h.is_symbol() || !h.symbol().is_theory()) return Builtin::None;
  if (t.num_args() != h.symbol().type().arity()) return Builtin::None;
  return h.symbol().op();
}

/// a ∧ b with `true` units dropped and `false` absorbing.
inline Term conj(const Term& a, const Term& b) {
  if (is_true(a)) return b;
  if (is_true(b)) return a;
  if (is_false(a)) return a;
  if (is_false(b)) return b;
  return binop(Builtin::And, a, b);
}
inline Term conj(std::span<const Term> parts) {
  Term out = truth();
  for (const auto& p : parts) out = conj(out, p);
  return out;
}
inline Term disj(const Term& a, const Term& b) {
  if (is_false(a)) return b;
  if (is_false(b)) return a;
  if (is_true(a)) return a;
  if (is_true(b)) return b;
  return binop(Builtin::Or, a, b);
}

/// Top-level conjuncts, left to right.
inline void conjuncts(const Term& phi, std::vector<Term>& out) {
  if (op_of(phi) == Builtin::And) {
    const auto a = phi.args();
    conjuncts(a[0], out);
    conjuncts(a[1], out);
  } else if (!is_true(phi)) {
    out.push_back(phi);
  }
}
inline std::vector<Term> conjuncts(const Term& phi) {
  std::vector<Term> out;
  conjuncts(phi, out);
  return out;
}

inline Term value_term(const Value& v) {
  if (const auto* n = std::get_if<Integer>(&v)) return num(*n);
  return boolean(std::get<bool>(v));
}

inline std::optional<Value> as_value(const Term& t) {
  if (!t.is_symbol()) return std::nullopt;
  const Symbol& f = t.symbol();
  if (f.op() == Builtin::IntValue) return Value(f.int_value());
  if (f.op() == Builtin::BoolValue) return Value(f.bool_value());
  return std::nullopt;
}

inline std::string to_string(const Value& v) {
  if (const auto* n = std::get_if<Integer>(&v)) return n->str();
  return std::get<bool>(v) ? "true" : "false";
}

namespace detail {

// Applies `op` to already evaluated arguments. nullopt on division by zero.
inline std::optional<Value> apply_op(Builtin op, std::span<const Value> a) {
  auto I = [&](std::size_t i) -> const Integer& { return std::get<Integer>(a[i]); };
  auto B = [&](std::size_t i) { return std::get<bool>(a[i]); };
  switch (op) {
    case Builtin::Add: return Value(Integer(I(0) + I(1)));
    case Builtin::Sub: return Value(Integer(I(0) - I(1)));
    case Builtin::Mul: return Value(Integer(I(0) * I(1)));
    case Builtin::Div:
      if (I(1) == 0) return std::nullopt;
      return Value(euclid_div(I(0), I(1)));
    case Builtin::Mod:
      if (I(1) == 0) return std::nullopt;
      return Value(euclid_mod(I(0), I(1)));
    case Builtin::Neg: return Value(Integer(-I(0)));
    case Builtin::Lt: return Value(I(0) < I(1));
    case Builtin::Le: return Value(I(0) <= I(1));
    case Builtin::Gt: return Value(I(0) > I(1));
    case Builtin::Ge: return Value(I(0) >= I(1));
    case Builtin::Eq: return Value(a[0] == a[1]);
    case Builtin::Neq: return Value(a[0] != a[1]);
    case Builtin::And: return Value(B(0) && B(1));
    case Builtin::Or: return Value(B(0) || B(1));
    case Builtin::Not: return Value(!B(0));
    default: return std::nullopt;
  }
}

}  // namespace detail

/// ⟦t⟧ for a ground theory term whose type is a sort.
inline Value interpret(const Term& t) {
  if (!t.type().is_base() || !t.type().is_theory_sort())
    throw EvalError("cannot interpret " + to_string(t) + ": type " + t.type().text() + " is not a theory sort");
  const Term h = t.head();
  if (!h.is_symbol() || !h.symbol().is_theory())
    throw EvalError("cannot interpret " + to_string(t) + ": " + to_string(h) + " is not a theory symbol");
  if (auto v = as_value(t)) return *v;
  std::vector<Value> vals;
  for (const auto& a : t.args()) vals.push_back(interpret(a));
  auto r = detail::apply_op(h.symbol().op(), vals);
  if (!r) throw EvalError("division by zero in " + to_string(t));
  return *r;
}

/// The value of a calculation redex f v1 ... vn (n > 0), if t is one.
inline std::optional<Term> calculate(const Term& t) {
  if (!t.is_app() || !t.type().is_base()) return std::nullopt;
  const Term h = t.head();
  if (!h.is_symbol() || !h.symbol().is_calculation()) return std::nullopt;
  std::vector<Value> vals;
  for (const auto& a : t.args()) {
    auto v = as_value(a);
    if (!v) return std::nullopt;
    vals.push_back(std::move(*v));
  }
  auto r = detail::apply_op(h.symbol().op(), vals);
  if (!r) return std::nullopt;
  return value_term(*r);
}

/// Positions of calculation redexes, leftmost-outermost.
inline std::vector<Position> kappa_redexes(const Term& t) {
  std::vector<Position> out;
  for (const auto& p : positions(t))
    if (calculate(subterm_at(t, p))) out.push_back(p);
  return out;
}

/// κ-normal form, computed innermost-leftmost.
inline Term kappa_normalize(const Term& t) {
  if (!t.is_app()) return t;
  const auto args = t.args();
  std::vector<Term> nargs;
  nargs.reserve(args.size());
  bool changed = false;
  for (const auto& a : args) {
    nargs.push_back(kappa_normalize(a));
    changed = changed || !(nargs.back() == a);
  }
  Term r = changed ? Term::apply(t.head(), nargs) : t;
  if (auto v = calculate(r)) return *v;
  return r;
}

/// κ-normal form by repeatedly contracting an outermost-rightmost redex.
/// Same result as kappa_normalize; kept as an independent route for tests.
inline Term kappa_normalize_outermost(const Term& t) {
  Term cur = t;
  for (;;) {
    auto rs = kappa_redexes(cur);
    if (rs.empty()) return cur;
    const Position* pick = &rs.front();
    for (const auto& p : rs)
      if (p.path.size() <= pick->path.size()) pick = &p;  // last among the shallowest
    cur = replace_at(cur, *pick, *calculate(subterm_at(cur, *pick)));
  }
}

/// All symbols are theory symbols and every variable lies in `allowed`.
inline bool is_theory_term(const Term& t, const VarSet& allowed) {
  switch (t.kind()) {
    case Term::Kind::Symbol: return t.symbol().is_theory();
    case Term::Kind::Variable: return allowed.contains(t.variable());
    case Term::Kind::Application: return is_theory_term(t.left(), allowed) && is_theory_term(t.right(), allowed);
  }
  return false;
}

/// All symbols are theory symbols and every variable has a theory sort.
inline bool is_theory_term(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Symbol: return t.symbol().is_theory();
    case Term::Kind::Variable: return t.type().is_theory_sort();
    case Term::Kind::Application: return is_theory_term(t.left()) && is_theory_term(t.right());
  }
  return false;
}

inline bool is_ground_theory_term(const Term& t) { return is_ground(t) && is_theory_term(t); }

/// A theory term of sort Bool over theory-sorted variables.
inline bool is_logical_constraint(const Term& t) { return t.type() == Type::bool_sort() && is_theory_term(t); }

/// ⟦φσ⟧ = 1. φσ must be ground; throws EvalError otherwise. A constraint
/// that gets stuck on a division by zero does not hold.
inline bool constraint_holds(const Term& phi, const Substitution& sigma) {
  const Term inst = apply_subst(phi, sigma);
  if (!is_ground(inst)) throw EvalError("constraint " + to_string(inst) + " is not ground");
  return is_true(kappa_normalize(inst));
}

}  // namespace theory
}  // namespace lctrs
