#pragma once

// Shared helpers for the tests: corpus loading, a solver from the
// environment, and seeded generators of random terms and systems.

#include "lctrs/lctrs.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lctrs::testing {

inline std::string corpus_path(const std::string& name) { return std::string(LCTRS_CORPUS) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ParseResult parse_text(const std::string& text) { return parse(text); }

inline Lcstrs load(const std::string& name) {
  ParseResult r = parse(read_text(corpus_path(name)));
  if (!r.ok()) {
    std::string msg = name + ":";
    for (const auto& e : r.errors) msg += " " + e.to_string();
    throw std::runtime_error(msg);
  }
  return *r.system;
}

inline Lcstrs system_from(const std::string& text) {
  ParseResult r = parse(text);
  if (!r.ok()) {
    std::string msg = "parse failed:";
    for (const auto& e : r.errors) msg += " " + e.to_string();
    throw std::runtime_error(msg);
  }
  return *r.system;
}

inline Term term(const std::string& text, const Lcstrs& system) {
  std::vector<ParseError> errors;
  auto t = parse_term(text, system, &errors);
  if (!t) throw std::runtime_error("cannot parse term " + text + ": " + (errors.empty() ? "" : errors[0].to_string()));
  return *t;
}

inline Term constraint(const std::string& text, const Lcstrs& system) { return term(text, system); }

inline SolverConfig solver_config() {
  SolverConfig c;
  c.timeout = std::chrono::milliseconds(5000);
  return c;
}

inline std::vector<std::string> strings(const std::vector<Sdp>& sdps) {
  std::vector<std::string> out;
  for (const auto& p : sdps) out.push_back(to_string(p));
  return out;
}

inline const Sdp& by_id(const std::vector<Sdp>& all, std::size_t id) {
  for (const auto& p : all)
    if (p.id == id) return p;
  throw std::runtime_error("no SDP " + std::to_string(id));
}

inline DpProblem problem_of(const DpProblem& all, std::initializer_list<std::size_t> ids, Flag flag = Flag::An) {
  DpProblem out{{}, flag};
  for (auto id : ids) out.sdps.push_back(by_id(all.sdps, id));
  return out;
}

// ---------------------------------------------------------------------------
// Random ground theory terms

class TheoryTermGen {
 public:
  explicit TheoryTermGen(std::uint32_t seed) : rng_(seed) {}

  Term int_term(int depth) {
    if (depth == 0 || pick(4) == 0) return theory::num(static_cast<long long>(pick(21)) - 10);
    switch (pick(6)) {
      case 0: return theory::add(int_term(depth - 1), int_term(depth - 1));
      case 1: return theory::sub(int_term(depth - 1), int_term(depth - 1));
      case 2: return theory::mul(int_term(depth - 1), int_term(depth - 1));
      case 3: return theory::div(int_term(depth - 1), nonzero());
      case 4: return theory::mod(int_term(depth - 1), nonzero());
      default: return theory::neg(int_term(depth - 1));
    }
  }

  Term bool_term(int depth) {
    if (depth == 0 || pick(5) == 0) return theory::boolean(pick(2) == 1);
    switch (pick(8)) {
      case 0: return theory::lt(int_term(depth - 1), int_term(depth - 1));
      case 1: return theory::le(int_term(depth - 1), int_term(depth - 1));
      case 2: return theory::ge(int_term(depth - 1), int_term(depth - 1));
      case 3: return theory::eq(int_term(depth - 1), int_term(depth - 1));
      case 4: return theory::neq(int_term(depth - 1), int_term(depth - 1));
      case 5: return theory::conj(bool_term(depth - 1), bool_term(depth - 1));
      case 6: return theory::disj(bool_term(depth - 1), bool_term(depth - 1));
      default: return theory::lnot(bool_term(depth - 1));
    }
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  Term nonzero() {
    const long long v = static_cast<long long>(pick(10)) + 1;
    return theory::num(pick(2) ? v : -v);
  }

  std::mt19937 rng_;
};

// ---------------------------------------------------------------------------
// Random small systems
//
// Sorts Int, Bool and up to two more; symbols over them with Int or sort
// arguments; constraints are conjunctions of atoms from a fixed pool.

class SystemGen {
 public:
  explicit SystemGen(std::uint32_t seed) : rng_(seed) {}

  Lcstrs next() {
    for (;;) {
      Lcstrs s = attempt();
      if (validate(s).empty() && !s.rules.empty()) return s;
    }
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  Lcstrs attempt() {
    Lcstrs s;
    const std::size_t extra_sorts = pick(3);
    std::vector<Type> sorts{Type::int_sort()};
    for (std::size_t i = 0; i < extra_sorts; ++i) sorts.push_back(s.signature.add_sort("s" + std::to_string(i)));

    // Constructors: for each extra sort a constant and a unary wrapper of Int.
    ctors_.clear();
    for (std::size_t i = 1; i < sorts.size(); ++i) {
      ctors_.push_back(s.signature.add_symbol("e" + std::to_string(i), sorts[i]));
      ctors_.push_back(s.signature.add_symbol("c" + std::to_string(i), Type::arrow(Type::int_sort(), sorts[i])));
    }
    // Defined symbols: one to three of arity 1..2.
    defs_.clear();
    const std::size_t ndefs = 1 + pick(3);
    for (std::size_t i = 0; i < ndefs; ++i) {
      std::vector<Type> args;
      const std::size_t arity = 1 + pick(2);
      for (std::size_t k = 0; k < arity; ++k) args.push_back(sorts[pick(sorts.size())]);
      const Type result = pick(3) == 0 ? sorts[pick(sorts.size())] : Type::int_sort();
      defs_.push_back(s.signature.add_symbol("f" + std::to_string(i), Type::arrows(args, result)));
    }
    const std::size_t nrules = 1 + pick(4);
    for (std::size_t r = 0; r < nrules; ++r) s.rules.push_back(rule());
    return s;
  }

  Term pattern(const Type& t, std::vector<Variable>& vars) {
    if (t == Type::int_sort()) {
      if (pick(4) == 0) return theory::num(static_cast<long long>(pick(3)));
      return fresh(t, vars);
    }
    std::vector<Symbol> fit;
    for (const auto& c : ctors_)
      if (c.type().result_sort() == t) fit.push_back(c);
    if (fit.empty() || pick(3) == 0) return fresh(t, vars);
    const Symbol& c = fit[pick(fit.size())];
    if (c.type().arity() == 0) return Term::sym(c);
    return Term::app(Term::sym(c), fresh(Type::int_sort(), vars));
  }

  Term fresh(const Type& t, std::vector<Variable>& vars) {
    Variable x{"v" + std::to_string(vars.size()), t};
    vars.push_back(x);
    return Term::var(x);
  }

  Term rhs(const Type& t, const std::vector<Variable>& vars, int depth) {
    std::vector<Term> options;
    for (const auto& x : vars)
      if (x.type == t) options.push_back(Term::var(x));
    if (t == Type::int_sort()) {
      options.push_back(theory::num(static_cast<long long>(pick(3))));
      if (depth > 0) {
        for (const auto& x : vars)
          if (x.type == t) {
            options.push_back(theory::sub(Term::var(x), theory::num(1)));
            options.push_back(theory::add(Term::var(x), theory::num(1)));
          }
      }
    } else {
      for (const auto& c : ctors_)
        if (c.type() == t) options.push_back(Term::sym(c));
    }
    if (depth > 0 && pick(2) == 0) {
      std::vector<Symbol> fit;
      for (const auto& f : defs_)
        if (f.type().result_sort() == t) fit.push_back(f);
      for (const auto& c : ctors_)
        if (c.type().arity() == 1 && c.type().result_sort() == t) fit.push_back(c);
      if (!fit.empty()) {
        const Symbol& f = fit[pick(fit.size())];
        std::vector<Term> args;
        for (const auto& a : f.type().arg_types()) args.push_back(rhs(a, vars, depth - 1));
        return Term::apply(Term::sym(f), args);
      }
    }
    if (options.empty()) return theory::num(0);
    return options[pick(options.size())];
  }

  Term atom(const std::vector<Variable>& ints) {
    const Term x = Term::var(ints[pick(ints.size())]);
    const Term y = Term::var(ints[pick(ints.size())]);
    switch (pick(7)) {
      case 0: return theory::gt(x, theory::num(0));
      case 1: return theory::le(x, theory::num(0));
      case 2: return theory::eq(x, y);
      case 3: return theory::neq(x, theory::num(0));
      case 4: return theory::lt(y, x);
      case 5: return theory::ge(x, theory::num(1));
      default: return theory::le(x, theory::num(2));
    }
  }

  Rule rule() {
    const Symbol& f = defs_[pick(defs_.size())];
    std::vector<Variable> vars;
    std::vector<Term> args;
    for (const auto& a : f.type().arg_types()) args.push_back(pattern(a, vars));
    const Term lhs = Term::apply(Term::sym(f), args);
    std::vector<Variable> ints;
    for (const auto& x : vars)
      if (x.type == Type::int_sort()) ints.push_back(x);
    Term phi = theory::truth();
    if (!ints.empty())
      for (std::size_t k = pick(3); k > 0; --k) phi = theory::conj(phi, atom(ints));
    phi = theory::kappa_normalize(phi);
    if (!theory::is_logical_constraint(phi)) phi = theory::truth();
    return Rule{lhs, rhs(f.type().result_sort(), vars, 2), phi};
  }

  std::mt19937 rng_;
  std::vector<Symbol> ctors_, defs_;
};

/// Ground terms for chain search: Int values in [lo, hi] and constructor
/// terms of each extra sort over them.
inline std::vector<Term> value_pool(const Lcstrs& s, long long lo, long long hi) {
  std::vector<Term> out;
  for (long long v = lo; v <= hi; ++v) out.push_back(theory::num(v));
  for (const auto& c : s.signature.symbols()) {
    if (s.is_defined(c)) continue;
    if (c.type().arity() == 0) out.push_back(Term::sym(c));
    if (c.type().arity() == 1 && c.type().arg_types()[0] == Type::int_sort())
      for (long long v = lo; v <= hi; ++v) out.push_back(Term::app(Term::sym(c), theory::num(v)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random subterm-criterion problems

// Proper subterm for first-order terms, written out independently.
inline bool strictly_below(const Term& s, const Term& t) {
  for (const auto& a : s.args())
    if (a == t || strictly_below(a, t)) return true;
  return false;
}

// Random problems over one sort with leaf/node, up to three heads of arity
// at most three.
class ProjectionGen {
 public:
  explicit ProjectionGen(std::uint32_t seed) : rng_(seed) {
    leaf_ = Symbol::plain("leaf", tree_);
    node_ = Symbol::plain("node", Type::arrow(tree_, Type::arrow(tree_, tree_)));
  }

  std::vector<Sdp> next() {
    std::vector<Symbol> hs;
    for (std::size_t k = 0, n = 1 + pick(3); k < n; ++k) {
      std::vector<Type> args(1 + pick(3), tree_);
      hs.push_back(Symbol::marked(Symbol::plain("h" + std::to_string(k), Type::arrows(args, tree_))));
    }
    std::vector<Sdp> P;
    for (std::size_t k = 0, n = 1 + pick(3); k < n; ++k) {
      const Symbol& f = hs[pick(hs.size())];
      const Symbol& g = hs[pick(hs.size())];
      std::vector<Term> ls, rs;
      for (std::size_t i = 0; i < f.type().arity(); ++i) ls.push_back(tree(2));
      // Right-hand arguments are often taken from inside the left.
      for (std::size_t i = 0; i < g.type().arity(); ++i) {
        if (pick(3) == 0) {
          rs.push_back(tree(1));
          continue;
        }
        const auto subs = subterms(ls[pick(ls.size())]);
        rs.push_back(subs[pick(subs.size())]);
      }
      P.push_back(Sdp{Term::apply(Term::sym(f), ls), Term::apply(Term::sym(g), rs), theory::truth(), {}, k + 1});
    }
    return P;
  }

 private:
  Term tree(int depth) {
    const std::size_t c = pick(depth > 0 ? 5 : 3);
    if (c == 0) return Term::sym(leaf_);
    if (c <= 2) return Term::var(c == 1 ? "a" : "b", tree_);
    return Term::apply(Term::sym(node_), std::vector<Term>{tree(depth - 1), tree(depth - 1)});
  }
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  std::mt19937 rng_;
  Type tree_ = Type::base("tree");
  Symbol leaf_, node_;
};

inline bool some_projection_works(const std::vector<Sdp>& P) {
  const auto hs = heads(P);
  std::vector<std::size_t> nu(hs.size(), 1);
  for (;;) {
    bool ok = true, strict = false;
    for (const auto& p : P) {
      const std::size_t a = nu[std::find(hs.begin(), hs.end(), p.lhs_head()) - hs.begin()];
      const std::size_t b = nu[std::find(hs.begin(), hs.end(), p.rhs_head()) - hs.begin()];
      const Term& l = p.lhs.arg(a);
      const Term& r = p.rhs.arg(b);
      if (strictly_below(l, r)) strict = true;
      else if (!(l == r)) ok = false;
    }
    if (ok && strict) return true;
    std::size_t k = 0;
    while (k < nu.size() && ++nu[k] > hs[k].type().arity()) nu[k++] = 1;
    if (k == nu.size()) return false;
  }
}

}  // namespace lctrs::testing
