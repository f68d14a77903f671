#pragma once

// Constrained rewrite rules, systems, validation, matching and one-step
// rewriting.

#include "lctrs/kernel.hpp"
#include "lctrs/theory.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace lctrs {

struct Rule {
  Term lhs;
  Term rhs;
  Term constraint;

  /// Var(φ) ∪ (Var(r) \ Var(ℓ)): the variables a respecting substitution maps to values.
  VarSet value_vars() const {
    VarSet out = free_vars(constraint);
    const VarSet l = free_vars(lhs);
    for (const auto& x : free_vars(rhs))
      if (!l.contains(x)) out.insert(x);
    return out;
  }
};

inline std::string to_string(const Rule& r) {
  std::string s = to_string(r.lhs) + " -> " + to_string(r.rhs);
  if (!theory::is_true(r.constraint)) s += " [" + to_string(r.constraint) + "]";
  return s;
}

/// Declared sorts and function symbols. Theory symbols and values are
/// built in and never stored here.
class Signature {
 public:
  Signature() {
    sorts_.push_back(Type::int_sort());
    sorts_.push_back(Type::bool_sort());
  }

  const Type& add_sort(const std::string& name) {
    for (const auto& s : sorts_)
      if (s.name() == name) return s;
    sorts_.push_back(Type::base(name));
    return sorts_.back();
  }
  std::optional<Type> sort(const std::string& name) const {
    for (const auto& s : sorts_)
      if (s.name() == name) return s;
    return std::nullopt;
  }
  const std::vector<Type>& sorts() const { return sorts_; }

  /// Declares f : type. Redeclaring with the same type is a no-op; a
  /// different type throws TypeError.
  Symbol add_symbol(const std::string& name, const Type& type) {
    if (auto f = find(name)) {
      if (!(f->type() == type))
        throw TypeError("symbol " + name + " redeclared with type " + type.text() + " (was " + f->type().text() + ")");
      return *f;
    }
    symbols_.push_back(Symbol::plain(name, type));
    return symbols_.back();
  }
  std::optional<Symbol> find(const std::string& name) const {
    for (const auto& f : symbols_)
      if (f.name() == name) return f;
    return std::nullopt;
  }
  const std::vector<Symbol>& symbols() const { return symbols_; }

 private:
  std::vector<Type> sorts_;
  std::vector<Symbol> symbols_;
};

enum class Goal { Termination, Public };

inline const char* to_string(Goal g) { return g == Goal::Termination ? "termination" : "public"; }

struct Lcstrs {
  Signature signature;
  std::vector<Rule> rules;
  std::set<std::string> hidden;

  bool is_defined(const Symbol& f) const {
    if (f.is_theory() || f.is_marked()) return false;
    for (const auto& r : rules) {
      const Term h = r.lhs.head();
      if (h.is_symbol() && h.symbol() == f) return true;
    }
    return false;
  }
  /// D, in order of first definition.
  std::vector<Symbol> defined_symbols() const {
    std::vector<Symbol> out;
    for (const auto& r : rules) {
      const Term h = r.lhs.head();
      if (!h.is_symbol()) continue;
      bool seen = false;
      for (const auto& f : out) seen = seen || f == h.symbol();
      if (!seen) out.push_back(h.symbol());
    }
    return out;
  }
  /// Values and the declared symbols that no rule defines.
  bool is_constructor(const Symbol& f) const {
    if (f.is_value()) return true;
    return !f.is_theory() && !f.is_marked() && !is_defined(f);
  }
  bool is_hidden(const Symbol& f) const { return hidden.contains(f.name()); }
};

// ---------------------------------------------------------------------------
// Validation

struct Diagnostic {
  std::optional<std::size_t> rule;  // 0-based rule index
  std::string message;

  std::string to_string() const {
    return rule ? "rule " + std::to_string(*rule + 1) + ": " + message : message;
  }
};

namespace detail {

inline void collect_symbols(const Term& t, std::vector<Symbol>& out) {
  switch (t.kind()) {
    case Term::Kind::Symbol: out.push_back(t.symbol()); break;
    case Term::Kind::Variable: break;
    case Term::Kind::Application:
      collect_symbols(t.left(), out);
      collect_symbols(t.right(), out);
      break;
  }
}

inline void collect_var_occurrences(const Term& t, std::vector<Variable>& out) {
  switch (t.kind()) {
    case Term::Kind::Symbol: break;
    case Term::Kind::Variable: out.push_back(t.variable()); break;
    case Term::Kind::Application:
      collect_var_occurrences(t.left(), out);
      collect_var_occurrences(t.right(), out);
      break;
  }
}

}  // namespace detail

inline std::vector<Symbol> symbols_of(const Term& t) {
  std::vector<Symbol> out;
  detail::collect_symbols(t, out);
  return out;
}

inline std::vector<Diagnostic> validate_rule(const Rule& r, std::size_t index, const Signature* sig = nullptr) {
  std::vector<Diagnostic> out;
  auto report = [&](std::string m) { out.push_back({index, std::move(m)}); };

  if (!(r.lhs.type() == r.rhs.type()))
    report("lhs and rhs have different types (" + r.lhs.type().text() + " vs " + r.rhs.type().text() + ")");
  if (!theory::is_logical_constraint(r.constraint)) report("constraint is not a logical constraint");

  if (r.lhs.is_var()) {
    report("lhs is a bare variable");
  } else if (!r.lhs.head().is_symbol()) {
    report("lhs head is a variable");
  } else {
    const Symbol& f = r.lhs.head().symbol();
    if (f.is_theory()) report("lhs head " + f.name() + " is a theory symbol");
    if (f.is_marked()) report("lhs head " + f.display() + " is a marked symbol");
    if (!is_pattern(r.lhs)) report("lhs is not a pattern");
    bool plain = false;
    for (const auto& g : symbols_of(r.lhs)) plain = plain || (!g.is_theory() && !g.is_marked());
    if (!plain) report("lhs contains no non-theory function symbol");
  }

  const VarSet lv = free_vars(r.lhs);
  for (const auto& x : free_vars(r.rhs))
    if (!lv.contains(x) && !x.type.is_theory_sort())
      report("fresh rhs variable of non-theory sort: " + x.name + " : " + x.type.text());

  std::map<std::string, Type> seen;
  std::vector<Variable> occ;
  for (const Term* t : {&r.lhs, &r.rhs, &r.constraint}) detail::collect_var_occurrences(*t, occ);
  for (const auto& x : occ) {
    auto [it, fresh] = seen.emplace(x.name, x.type);
    if (!fresh && !(it->second == x.type)) {
      report("variable " + x.name + " used at types " + it->second.text() + " and " + x.type.text());
      it->second = x.type;
    }
  }

  if (sig) {
    std::set<std::string> unknown;
    for (const Term* t : {&r.lhs, &r.rhs, &r.constraint})
      for (const auto& g : symbols_of(*t)) {
        if (g.is_theory() || g.is_marked()) continue;
        auto d = sig->find(g.name());
        if (!d || !(d->type() == g.type())) unknown.insert(g.name());
      }
    for (const auto& n : unknown) report("undeclared symbol " + n);
  }
  return out;
}

/// Empty iff every rule is well formed and the hidden set is declared.
inline std::vector<Diagnostic> validate(const Lcstrs& system) {
  std::vector<Diagnostic> out;
  for (std::size_t i = 0; i < system.rules.size(); ++i) {
    auto d = validate_rule(system.rules[i], i, &system.signature);
    out.insert(out.end(), d.begin(), d.end());
  }
  for (const auto& h : system.hidden)
    if (!system.signature.find(h)) out.push_back({std::nullopt, "hidden symbol " + h + " is not declared"});
  return out;
}

// ---------------------------------------------------------------------------
// Matching and rewriting

namespace detail {
inline bool match_into(const Term& p, const Term& s, Substitution& sigma) {
  if (!(p.type() == s.type())) return false;
  switch (p.kind()) {
    case Term::Kind::Variable: {
      auto [it, fresh] = sigma.emplace(p.variable(), s);
      return fresh || it->second == s;
    }
    case Term::Kind::Symbol: return s.is_symbol() && s.symbol() == p.symbol();
    case Term::Kind::Application:
      return s.is_app() && match_into(p.left(), s.left(), sigma) && match_into(p.right(), s.right(), sigma);
  }
  return false;
}
}  // namespace detail

/// σ with pattern σ = subject, if one exists.
inline std::optional<Substitution> match(const Term& pattern, const Term& subject) {
  Substitution sigma;
  if (!detail::match_into(pattern, subject, sigma)) return std::nullopt;
  return sigma;
}

/// σ maps Var(φ) ∪ (Var(r) \ Var(ℓ)) to values and ⟦φσ⟧ = 1.
inline bool respects(const Substitution& sigma, const Rule& rule) {
  for (const auto& x : rule.value_vars()) {
    auto it = sigma.find(x);
    if (it == sigma.end() || !it->second.is_value()) return false;
  }
  return theory::constraint_holds(rule.constraint, sigma);
}

/// Finite stock of values used to instantiate variables that matching
/// leaves unbound.
struct ValuePool {
  std::vector<Integer> ints{-1, 0, 1};
  std::vector<bool> bools{false, true};

  std::vector<Term> values_of(const Type& t) const {
    std::vector<Term> out;
    if (t == Type::int_sort())
      for (const auto& n : ints) out.push_back(theory::num(n));
    else if (t == Type::bool_sort())
      for (bool b : bools) out.push_back(theory::boolean(b));
    return out;
  }
};

/// The integer literals of the system's rules together with -1, 0, 1.
inline ValuePool default_value_pool(const Lcstrs& system) {
  std::set<Integer> ints{-1, 0, 1};
  for (const auto& r : system.rules)
    for (const Term* t : {&r.lhs, &r.rhs, &r.constraint})
      for (const auto& g : symbols_of(*t))
        if (g.op() == Builtin::IntValue) ints.insert(g.int_value());
  ValuePool pool;
  pool.ints.assign(ints.begin(), ints.end());
  return pool;
}

struct Step {
  Position position;
  std::optional<std::size_t> rule;  // none for a calculation step
  Substitution sigma;

  bool is_calculation() const { return !rule.has_value(); }
  std::string to_string() const {
    return rule ? "rule " + std::to_string(*rule + 1) + " at " + position.to_string()
                : "calc at " + position.to_string();
  }
};

struct Reduct {
  Term term;
  Step step;
};

/// Every one-step successor of t, by position in leftmost-outermost order,
/// rules in order before the calculation step at the same position.
/// Unbound value variables range over `pool`.
inline std::vector<Reduct> reducts(const Lcstrs& system, const Term& t, const ValuePool& pool = {}) {
  std::vector<Reduct> out;
  for (const auto& pos : positions(t)) {
    const Term sub = subterm_at(t, pos);
    for (std::size_t i = 0; i < system.rules.size(); ++i) {
      const Rule& rule = system.rules[i];
      auto sigma = match(rule.lhs, sub);
      if (!sigma) continue;
      std::vector<Variable> open;
      for (const auto& x : rule.value_vars())
        if (!sigma->contains(x)) open.push_back(x);
      std::vector<std::vector<Term>> choices;
      for (const auto& x : open) choices.push_back(pool.values_of(x.type));
      std::vector<std::size_t> idx(open.size(), 0);
      bool done = false;
      for (const auto& c : choices) done = done || c.empty();
      while (!done) {
        Substitution s = *sigma;
        for (std::size_t k = 0; k < open.size(); ++k) s[open[k]] = choices[k][idx[k]];
        if (respects(s, rule)) out.push_back({replace_at(t, pos, apply_subst(rule.rhs, s)), Step{pos, i, s}});
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == choices[k].size()) idx[k++] = 0;
        done = k == idx.size();
      }
    }
    if (auto v = theory::calculate(sub)) out.push_back({replace_at(t, pos, *v), Step{pos, std::nullopt, {}}});
  }
  return out;
}

/// Applies a recorded step to t again; nullopt if the step does not apply.
inline std::optional<Term> replay(const Lcstrs& system, const Term& t, const Step& step) {
  const Term sub = subterm_at(t, step.position);
  if (step.is_calculation()) {
    auto v = theory::calculate(sub);
    if (!v) return std::nullopt;
    return replace_at(t, step.position, *v);
  }
  const Rule& rule = system.rules.at(*step.rule);
  if (!(apply_subst(rule.lhs, step.sigma) == sub) || !respects(step.sigma, rule)) return std::nullopt;
  return replace_at(t, step.position, apply_subst(rule.rhs, step.sigma));
}

// ---------------------------------------------------------------------------
// Extensions

struct ExtensionCheck {
  bool hierarchical = false;
  bool is_public = false;
  std::string reason;  // why the extension is rejected or not public
};

/// Whether ext is a hierarchical (and public) extension of base.
inline ExtensionCheck check_extension(const Lcstrs& base, const Lcstrs& ext) {
  ExtensionCheck out;
  for (const auto& f : ext.signature.symbols())
    if (auto g = base.signature.find(f.name()); g && !(g->type() == f.type())) {
      out.reason = "symbol " + f.name() + " has type " + f.type().text() + " in the extension but " +
                   g->type().text() + " in the base";
      return out;
    }
  for (const auto& f : ext.defined_symbols())
    if (base.signature.find(f.name())) {
      out.reason = "extension redefines base symbol " + f.name();
      return out;
    }
  out.hierarchical = true;
  out.is_public = true;
  for (std::size_t i = 0; i < ext.rules.size() && out.is_public; ++i) {
    const Rule& r = ext.rules[i];
    for (const Term* t : {&r.lhs, &r.rhs, &r.constraint})
      for (const auto& g : symbols_of(*t))
        if (out.is_public && base.hidden.contains(g.name()) && !g.is_theory()) {
          out.is_public = false;
          out.reason = "hidden symbol " + g.name() + " occurs in extension rule " + std::to_string(i + 1);
        }
  }
  return out;
}

}  // namespace lctrs
