#pragma once

// DP processors: graph, subterm criterion, integer mapping, theory
// arguments, constraint modification and reachability.

#include "lctrs/graph.hpp"
#include "lctrs/kernel.hpp"
#include "lctrs/sdp.hpp"
#include "lctrs/solver.hpp"
#include "lctrs/theory.hpp"
#include "lctrs/trs.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lctrs {

/// Numbers SDPs by first appearance so that equal SDPs share a number.
class SdpRegistry {
 public:
  Sdp intern(Sdp p) {
    for (const auto& q : all_)
      if (q.same(p)) {
        p.id = q.id;
        return p;
      }
    p.id = all_.size() + 1;
    all_.push_back(p);
    return p;
  }
  void seed(DpProblem& P) {
    for (auto& p : P.sdps) p = intern(std::move(p));
  }
  const std::vector<Sdp>& all() const { return all_; }

 private:
  std::vector<Sdp> all_;
};

struct Context {
  const Lcstrs& system;
  SmtSolver& solver;
  SdpRegistry* registry = nullptr;

  Sdp intern(Sdp p) const { return registry ? registry->intern(std::move(p)) : p; }
};

// ---------------------------------------------------------------------------
// Witnesses

struct GraphWitness {
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // SDP numbers
  std::vector<std::vector<std::size_t>> components;       // non-trivial SCCs, SDP numbers
};

struct SubtermWitness {
  std::vector<std::pair<Symbol, std::size_t>> nu;
  std::vector<std::size_t> strict;  // SDP numbers
};

struct IntegerWitness {
  /// J(f♯) as an Int-valued theory term over x1, x2, ... (argument positions).
  std::vector<std::pair<Symbol, Term>> J;
  std::vector<std::size_t> strict;
};

struct TheoryArgWitness {
  std::vector<std::pair<Symbol, std::set<std::size_t>>> tau;
  std::vector<std::size_t> fixed;
  bool public_variant = false;  // the single-output rule for pu problems
};

struct SplitWitness {
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> splits;
};

struct ReachWitness {
  std::vector<std::size_t> sources;
  std::vector<std::size_t> removed;
};

struct PairWitness {
  std::string name;
  std::vector<std::size_t> strict;
};

using Witness =
    std::variant<GraphWitness, SubtermWitness, IntegerWitness, TheoryArgWitness, SplitWitness, ReachWitness, PairWitness>;

struct Application {
  std::string processor;
  Witness witness;
  std::vector<DpProblem> children;
};

namespace detail {

inline std::vector<std::size_t> ids(const std::vector<Sdp>& P, const std::vector<bool>& mask, bool value = true) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < P.size(); ++i)
    if (mask[i] == value) out.push_back(P[i].id);
  return out;
}

inline std::vector<Sdp> select(const std::vector<Sdp>& P, const std::vector<bool>& mask, bool value = true) {
  std::vector<Sdp> out;
  for (std::size_t i = 0; i < P.size(); ++i)
    if (mask[i] == value) out.push_back(P[i]);
  return out;
}

inline bool same_set(const std::vector<Sdp>& a, const std::vector<Sdp>& b) {
  if (a.size() != b.size()) return false;
  for (const auto& p : a) {
    bool found = false;
    for (const auto& q : b) found = found || p.same(q);
    if (!found) return false;
  }
  return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Graph processor

/// One problem per non-trivial SCC, flag an. Not applicable when the
/// result would be P itself.
inline std::optional<Application> graph_processor(const DpProblem& P, const Context& ctx) {
  const Graph g = build_graph(P.sdps, ctx.system, ctx.solver);
  GraphWitness w;
  for (auto [i, j] : g.edges()) w.edges.emplace_back(P.sdps[i].id, P.sdps[j].id);
  Application app{"graph", {}, {}};
  for (const auto& c : nontrivial_sccs(g)) {
    DpProblem sub;
    sub.flag = Flag::An;
    std::vector<std::size_t> comp;
    for (auto v : c) {
      sub.sdps.push_back(P.sdps[v]);
      comp.push_back(P.sdps[v].id);
    }
    w.components.push_back(std::move(comp));
    app.children.push_back(std::move(sub));
  }
  if (app.children.size() == 1 && app.children[0].size() == P.size()) return std::nullopt;
  app.witness = std::move(w);
  return app;
}

// ---------------------------------------------------------------------------
// Subterm criterion

enum class SubtermRel { None, Equal, Strict };

inline SubtermRel subterm_rel(const Term& s, const Term& t) {
  if (s == t) return SubtermRel::Equal;
  return is_proper_subterm(s, t) ? SubtermRel::Strict : SubtermRel::None;
}

/// ν̄(s♯) against ν̄(t♯) for every SDP, or nullopt if some SDP is neither.
inline std::optional<std::vector<bool>> check_projection(const std::vector<Sdp>& P,
                                                         const std::map<Symbol, std::size_t>& nu) {
  std::vector<bool> strict;
  for (const auto& p : P) {
    auto a = nu.find(p.lhs_head()), b = nu.find(p.rhs_head());
    if (a == nu.end() || b == nu.end()) return std::nullopt;
    if (a->second < 1 || a->second > p.lhs.num_args() || b->second < 1 || b->second > p.rhs.num_args())
      return std::nullopt;
    const auto rel = subterm_rel(p.lhs.arg(a->second), p.rhs.arg(b->second));
    if (rel == SubtermRel::None) return std::nullopt;
    strict.push_back(rel == SubtermRel::Strict);
  }
  return strict;
}

inline std::optional<Application> subterm_criterion(const DpProblem& P, const Context& ctx) {
  if (P.empty()) return std::nullopt;
  const auto hs = heads(P.sdps);
  std::map<Symbol, Term> N;
  Term phi = theory::truth();
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const Term v = Term::var("N!" + std::to_string(k + 1), Type::int_sort());
    N.emplace(hs[k], v);
    phi = theory::conj(phi, theory::conj(theory::ge(v, theory::num(1)),
                                         theory::le(v, theory::num(static_cast<long long>(hs[k].type().arity())))));
  }
  if (std::any_of(hs.begin(), hs.end(), [](const Symbol& f) { return f.type().arity() == 0; })) return std::nullopt;
  Term some_strict = theory::boolean(false);
  for (std::size_t k = 0; k < P.size(); ++k) {
    const Sdp& p = P.sdps[k];
    const Term strict = Term::var("strict!" + std::to_string(k + 1), Type::bool_sort());
    some_strict = theory::disj(some_strict, strict);
    const Term nf = N.at(p.lhs_head()), ng = N.at(p.rhs_head());
    const auto ss = p.lhs.args(), ts = p.rhs.args();
    for (std::size_t i = 0; i < ss.size(); ++i)
      for (std::size_t j = 0; j < ts.size(); ++j) {
        Term chosen = theory::conj(theory::eq(nf, theory::num(static_cast<long long>(i + 1))),
                                   theory::eq(ng, theory::num(static_cast<long long>(j + 1))));
        Term then;
        switch (subterm_rel(ss[i], ts[j])) {
          case SubtermRel::Strict: then = strict; break;
          case SubtermRel::Equal: then = theory::lnot(strict); break;
          case SubtermRel::None: then = theory::boolean(false); break;
        }
        phi = theory::conj(phi, theory::disj(theory::lnot(chosen), then));
      }
  }
  phi = theory::conj(phi, some_strict);
  const SatResult r = ctx.solver.check_sat(phi);
  if (!r.sat()) return std::nullopt;

  std::map<Symbol, std::size_t> nu;
  SubtermWitness w;
  for (const auto& f : hs) {
    const auto& val = r.model.at(N.at(f).variable());
    const auto pos = static_cast<std::size_t>(std::get<Integer>(val));
    nu.emplace(f, pos);
    w.nu.emplace_back(f, pos);
  }
  auto strict = check_projection(P.sdps, nu);
  if (!strict) throw SolverError("subterm criterion: projection from the solver does not orient the problem");
  if (std::none_of(strict->begin(), strict->end(), [](bool b) { return b; })) return std::nullopt;
  w.strict = detail::ids(P.sdps, *strict);
  return Application{"subterm criterion", std::move(w), {DpProblem{detail::select(P.sdps, *strict, false), Flag::An}}};
}

// ---------------------------------------------------------------------------
// Integer mappings

/// x_i, the variable standing for argument i in an integer mapping.
inline Term position_var(std::size_t i) { return Term::var("x" + std::to_string(i), Type::int_sort()); }

/// FI(f♯): positions of Int arguments that are theory terms over L at every
/// occurrence of f♯ in P.
inline std::set<std::size_t> free_int_positions(const Symbol& f, const std::vector<Sdp>& P) {
  std::set<std::size_t> out;
  const auto tys = f.type().arg_types();
  for (std::size_t i = 0; i < tys.size(); ++i)
    if (tys[i].is_theory_sort()) out.insert(i + 1);
  for (const auto& p : P)
    for (const Term* side : {&p.lhs, &p.rhs}) {
      if (!(side->head().symbol() == f)) continue;
      const auto args = side->args();
      for (auto it = out.begin(); it != out.end();)
        it = theory::is_theory_term(args[*it - 1], p.lvars) ? std::next(it) : out.erase(it);
    }
  return out;
}

/// J̄(f♯ t1 ... tn) = J(f♯)[x_i := t_i]
inline Term apply_mapping(const Term& J, const Term& marked) {
  Substitution s;
  const auto args = marked.args();
  for (const auto& x : free_vars(J)) {
    const std::size_t i = std::stoul(x.name.substr(1));
    s.emplace(x, args.at(i - 1));
  }
  return apply_subst(J, s);
}

namespace detail {

/// Σ coeff·x_i + constant over argument positions.
struct Linear {
  std::map<std::size_t, Integer> coeff;
  Integer constant = 0;

  Linear& operator+=(const Linear& o) {
    for (const auto& [i, c] : o.coeff) coeff[i] += c;
    constant += o.constant;
    return *this;
  }
  Linear negated() const {
    Linear out;
    for (const auto& [i, c] : coeff) out.coeff[i] = -c;
    out.constant = -constant;
    return out;
  }
  void normalize() {
    for (auto it = coeff.begin(); it != coeff.end();) it = it->second == 0 ? coeff.erase(it) : std::next(it);
  }
  bool operator<(const Linear& o) const {
    return std::tie(coeff, constant) < std::tie(o.coeff, o.constant);
  }
  bool operator==(const Linear& o) const { return coeff == o.coeff && constant == o.constant; }

  Term to_term() const {
    std::optional<Term> out;
    for (const auto& [i, c] : coeff) {
      const Integer mag = c < 0 ? Integer(-c) : c;
      Term atom = mag == 1 ? position_var(i) : theory::mul(theory::num(mag), position_var(i));
      if (!out) out = c < 0 ? theory::neg(atom) : atom;
      else out = c < 0 ? theory::sub(*out, atom) : theory::add(*out, atom);
    }
    if (!out) return theory::num(constant);
    if (constant > 0) return theory::add(*out, theory::num(constant));
    if (constant < 0) return theory::sub(*out, theory::num(Integer(-constant)));
    return *out;
  }
};

/// Linear form of t when every variable is a direct lhs argument at a
/// position in fi.
inline std::optional<Linear> linearize(const Term& t, const std::map<Variable, std::size_t>& pos_of) {
  if (t.is_var()) {
    auto it = pos_of.find(t.variable());
    if (it == pos_of.end()) return std::nullopt;
    Linear l;
    l.coeff[it->second] = 1;
    return l;
  }
  if (t.is_value() && t.symbol().op() == Builtin::IntValue) {
    Linear l;
    l.constant = t.symbol().int_value();
    return l;
  }
  const auto args = t.args();
  switch (theory::op_of(t)) {
    case Builtin::Add: {
      auto a = linearize(args[0], pos_of), b = linearize(args[1], pos_of);
      if (!a || !b) return std::nullopt;
      *a += *b;
      return a;
    }
    case Builtin::Sub: {
      auto a = linearize(args[0], pos_of), b = linearize(args[1], pos_of);
      if (!a || !b) return std::nullopt;
      *a += b->negated();
      return a;
    }
    case Builtin::Neg: {
      auto a = linearize(args[0], pos_of);
      if (!a) return std::nullopt;
      return a->negated();
    }
    case Builtin::Mul: {
      auto a = linearize(args[0], pos_of), b = linearize(args[1], pos_of);
      if (!a || !b) return std::nullopt;
      if (a->coeff.empty()) std::swap(a, b);
      if (!b->coeff.empty()) return std::nullopt;
      for (auto& [i, c] : a->coeff) c *= b->constant;
      a->constant *= b->constant;
      return a;
    }
    default: return std::nullopt;
  }
}

inline void collect_int_literals(const Term& t, std::set<Integer>& out) {
  for (const auto& g : symbols_of(t))
    if (g.op() == Builtin::IntValue) out.insert(g.int_value() < 0 ? Integer(-g.int_value()) : g.int_value());
}

}  // namespace detail

/// Interpretation candidates for f♯, most preferred first.
inline std::vector<Term> mapping_candidates(const Symbol& f, const std::vector<Sdp>& P) {
  std::vector<std::size_t> I;
  const auto tys = f.type().arg_types();
  for (auto i : free_int_positions(f, P))
    if (tys[i - 1] == Type::int_sort()) I.push_back(i);

  std::set<Integer> consts{0, 1};
  for (const auto& p : P) detail::collect_int_literals(p.constraint, consts);

  std::vector<detail::Linear> cands;
  auto add = [&](detail::Linear l) {
    l.normalize();
    for (const auto& c : cands)
      if (c == l) return;
    cands.push_back(std::move(l));
  };
  auto var = [](std::size_t i, long c) {
    detail::Linear l;
    l.coeff[i] = c;
    return l;
  };
  for (auto i : I) add(var(i, 1));
  for (auto i : I) add(var(i, -1));
  for (std::size_t a = 0; a < I.size(); ++a)
    for (std::size_t b = a + 1; b < I.size(); ++b) {
      auto l = var(I[a], 1);
      l += var(I[b], 1);
      add(l);
    }
  for (auto i : I)
    for (auto j : I) {
      if (i == j) continue;
      for (const auto& c : consts) {
        auto l = var(i, 1);
        l += var(j, -1);
        l.constant = -c;
        add(l);
      }
    }

  // Atoms of the constraints of SDPs headed by f♯, read as "e ≥ 0".
  for (const auto& p : P) {
    if (!(p.lhs_head() == f)) continue;
    std::map<Variable, std::size_t> pos_of;
    const auto args = p.lhs.args();
    for (auto i : I)
      if (args[i - 1].is_var()) pos_of.emplace(args[i - 1].variable(), i);
    for (const auto& atom : theory::conjuncts(p.constraint)) {
      const auto op = theory::op_of(atom);
      if (op != Builtin::Lt && op != Builtin::Le && op != Builtin::Gt && op != Builtin::Ge) continue;
      const auto ab = atom.args();
      auto a = detail::linearize(ab[0], pos_of), b = detail::linearize(ab[1], pos_of);
      if (!a || !b) continue;
      detail::Linear e;
      if (op == Builtin::Lt || op == Builtin::Le) {
        e = *b;
        e += a->negated();
      } else {
        e = *a;
        e += b->negated();
      }
      if (op == Builtin::Lt || op == Builtin::Gt) e.constant -= 1;
      e.normalize();
      if (!e.coeff.empty()) add(e);
    }
  }
  add(detail::Linear{});

  std::vector<Term> out;
  for (const auto& c : cands) out.push_back(c.to_term());
  return out;
}

/// Checks the orientation obligations of J on P: nullopt if some SDP is
/// not weakly oriented, else the strictly oriented SDPs.
inline std::optional<std::vector<bool>> check_integer_mapping(const std::vector<Sdp>& P,
                                                              const std::map<Symbol, Term>& J, SmtSolver& solver) {
  std::vector<bool> strict;
  for (const auto& p : P) {
    const Term js = apply_mapping(J.at(p.lhs_head()), p.lhs);
    const Term jt = apply_mapping(J.at(p.rhs_head()), p.rhs);
    const bool s =
        solver.check_entailment(p.constraint, theory::conj(theory::ge(js, theory::num(0)), theory::gt(js, jt))).valid();
    if (!s && !solver.check_entailment(p.constraint, theory::ge(js, jt)).valid()) return std::nullopt;
    strict.push_back(s);
  }
  return strict;
}

inline std::optional<Application> integer_mapping(const DpProblem& P, const Context& ctx) {
  if (P.empty()) return std::nullopt;
  const auto hs = heads(P.sdps);
  std::vector<std::vector<Term>> cands;
  for (const auto& f : hs) cands.push_back(mapping_candidates(f, P.sdps));
  auto head_index = [&](const Symbol& f) {
    return static_cast<std::size_t>(std::find(hs.begin(), hs.end(), f) - hs.begin());
  };

  std::vector<std::vector<Term>> sel(hs.size());
  Term phi = theory::truth();
  for (std::size_t h = 0; h < hs.size(); ++h) {
    Term one = theory::boolean(false);
    for (std::size_t c = 0; c < cands[h].size(); ++c) {
      sel[h].push_back(Term::var("sel!" + std::to_string(h + 1) + "!" + std::to_string(c + 1), Type::bool_sort()));
      one = theory::disj(one, sel[h][c]);
      for (std::size_t d = 0; d < c; ++d)
        phi = theory::conj(phi, theory::lnot(theory::conj(sel[h][c], sel[h][d])));
    }
    phi = theory::conj(phi, one);
  }

  Term some_strict = theory::boolean(false);
  for (std::size_t k = 0; k < P.size(); ++k) {
    const Sdp& p = P.sdps[k];
    const Term strict = Term::var("strict!" + std::to_string(k + 1), Type::bool_sort());
    some_strict = theory::disj(some_strict, strict);
    const std::size_t hf = head_index(p.lhs_head()), hg = head_index(p.rhs_head());
    for (std::size_t a = 0; a < cands[hf].size(); ++a)
      for (std::size_t b = 0; b < cands[hg].size(); ++b) {
        if (hf == hg && a != b) continue;
        const Term js = apply_mapping(cands[hf][a], p.lhs);
        const Term jt = apply_mapping(cands[hg][b], p.rhs);
        const Term chosen = theory::conj(sel[hf][a], sel[hg][b]);
        Term then;
        if (ctx.solver.check_entailment(p.constraint, theory::conj(theory::ge(js, theory::num(0)), theory::gt(js, jt)))
                .valid())
          then = theory::truth();
        else if (ctx.solver.check_entailment(p.constraint, theory::ge(js, jt)).valid())
          then = theory::lnot(strict);
        else
          then = theory::boolean(false);
        phi = theory::conj(phi, theory::disj(theory::lnot(chosen), then));
      }
  }
  phi = theory::conj(phi, some_strict);
  if (!ctx.solver.check_sat(phi).sat()) return std::nullopt;

  // Fix each head to its first workable candidate.
  std::map<Symbol, Term> J;
  for (std::size_t h = 0; h < hs.size(); ++h) {
    for (std::size_t c = 0; c < cands[h].size(); ++c) {
      const Term attempt = theory::conj(phi, sel[h][c]);
      if (ctx.solver.check_sat(attempt).sat()) {
        phi = attempt;
        J.emplace(hs[h], cands[h][c]);
        break;
      }
    }
    if (!J.contains(hs[h])) return std::nullopt;
  }

  auto strict = check_integer_mapping(P.sdps, J, ctx.solver);
  if (!strict) throw SolverError("integer mapping: selected interpretation does not orient the problem");
  if (std::none_of(strict->begin(), strict->end(), [](bool b) { return b; })) return std::nullopt;
  IntegerWitness w;
  for (const auto& f : hs) w.J.emplace_back(f, J.at(f));
  w.strict = detail::ids(P.sdps, *strict);
  return Application{"integer mapping", std::move(w), {DpProblem{detail::select(P.sdps, *strict, false), Flag::An}}};
}

// ---------------------------------------------------------------------------
// Theory arguments

using TheoryArgMap = std::map<Symbol, std::set<std::size_t>>;

/// τ̄(p): L extended with the variables of the τ-positions of the lhs.
inline Sdp extend_by(const Sdp& p, const TheoryArgMap& tau) {
  Sdp out = p;
  const auto args = p.lhs.args();
  if (auto it = tau.find(p.lhs_head()); it != tau.end())
    for (auto i : it->second)
      for (const auto& x : free_vars(args[i - 1])) out.lvars.insert(x);
  if (!(out.lvars == p.lvars)) out.id = 0;
  return out;
}

/// τ fixes p: the rhs arguments at τ-positions only use variables from L.
inline bool fixes(const TheoryArgMap& tau, const Sdp& p) {
  auto it = tau.find(p.rhs_head());
  if (it == tau.end()) return true;
  const auto args = p.rhs.args();
  for (auto i : it->second)
    for (const auto& x : free_vars(args[i - 1]))
      if (!p.lvars.contains(x)) return false;
  return true;
}

/// The two closure conditions of a theory argument mapping.
inline bool is_theory_arg_map(const TheoryArgMap& tau, const std::vector<Sdp>& P) {
  for (const auto& p : P) {
    const auto ss = p.lhs.args(), ts = p.rhs.args();
    VarSet allowed = p.lvars;
    if (auto it = tau.find(p.lhs_head()); it != tau.end())
      for (auto i : it->second) {
        if (!ss[i - 1].type().is_theory_sort() || !theory::is_theory_term(ss[i - 1])) return false;
        for (const auto& x : free_vars(ss[i - 1])) allowed.insert(x);
      }
    if (auto it = tau.find(p.rhs_head()); it != tau.end())
      for (auto j : it->second)
        if (!ts[j - 1].type().is_theory_sort() || !theory::is_theory_term(ts[j - 1], allowed)) return false;
  }
  return true;
}

namespace detail {

/// Greatest τ below the full one that fixes P[target] and satisfies the closure conditions.
inline TheoryArgMap shrink_theory_args(const std::vector<Sdp>& P, std::size_t target) {
  TheoryArgMap tau;
  for (const auto& f : heads(P)) {
    auto& s = tau[f];
    const auto tys = f.type().arg_types();
    for (std::size_t i = 0; i < tys.size(); ++i)
      if (tys[i].is_theory_sort()) s.insert(i + 1);
  }
  for (bool changed = true; changed;) {
    changed = false;
    auto drop = [&](const Symbol& f, std::size_t i) { changed = tau[f].erase(i) > 0 || changed; };
    {
      const Sdp& p = P[target];
      const auto ts = p.rhs.args();
      for (auto j : std::set<std::size_t>(tau[p.rhs_head()]))
        for (const auto& x : free_vars(ts[j - 1]))
          if (!p.lvars.contains(x)) drop(p.rhs_head(), j);
    }
    for (const auto& p : P) {
      const auto ss = p.lhs.args();
      for (auto i : std::set<std::size_t>(tau[p.lhs_head()]))
        if (!theory::is_theory_term(ss[i - 1])) drop(p.lhs_head(), i);
    }
    for (const auto& p : P) {
      VarSet allowed = p.lvars;
      const auto ss = p.lhs.args(), ts = p.rhs.args();
      for (auto i : tau[p.lhs_head()])
        for (const auto& x : free_vars(ss[i - 1])) allowed.insert(x);
      for (auto j : std::set<std::size_t>(tau[p.rhs_head()]))
        if (!theory::is_theory_term(ts[j - 1], allowed)) drop(p.rhs_head(), j);
    }
  }
  return tau;
}

}  // namespace detail

inline std::optional<Application> theory_argument(const DpProblem& P, const Context& ctx) {
  for (std::size_t target = 0; target < P.size(); ++target) {
    const TheoryArgMap tau = detail::shrink_theory_args(P.sdps, target);
    if (!is_theory_arg_map(tau, P.sdps)) throw std::logic_error("theory argument search produced an invalid mapping");
    std::vector<bool> fixed(P.size());
    for (std::size_t k = 0; k < P.size(); ++k) fixed[k] = fixes(tau, P.sdps[k]);

    std::vector<Sdp> extended;
    for (const auto& p : P.sdps) extended.push_back(extend_by(p, tau));
    bool grows = false;
    for (std::size_t k = 0; k < P.size(); ++k) grows = grows || !(extended[k].lvars == P.sdps[k].lvars);
    if (!grows) continue;

    TheoryArgWitness w;
    for (const auto& [f, s] : tau) w.tau.emplace_back(f, s);
    // Keep the order of heads(P) rather than the map order.
    std::vector<std::pair<Symbol, std::set<std::size_t>>> ordered;
    for (const auto& f : heads(P.sdps)) ordered.emplace_back(f, tau.at(f));
    w.tau = std::move(ordered);
    w.fixed = detail::ids(P.sdps, fixed);

    Application app{"theory arguments", {}, {}};
    bool all_public_fixed = P.flag == Flag::Pu;
    if (all_public_fixed)
      for (std::size_t k = 0; k < P.size(); ++k)
        if (is_public(P.sdps[k], ctx.system.hidden) && !fixed[k]) all_public_fixed = false;
    if (all_public_fixed) {
      DpProblem only{{}, Flag::Pu};
      for (std::size_t k = 0; k < P.size(); ++k)
        only.sdps.push_back(is_public(P.sdps[k], ctx.system.hidden) ? P.sdps[k] : ctx.intern(extended[k]));
      if (detail::same_set(only.sdps, P.sdps)) continue;
      w.public_variant = true;
      app.children.push_back(std::move(only));
    } else {
      DpProblem first{{}, Flag::An};
      for (auto& p : extended) first.sdps.push_back(ctx.intern(p));
      app.children.push_back(std::move(first));
      app.children.push_back(DpProblem{detail::select(P.sdps, fixed, false), P.flag});
    }
    app.witness = std::move(w);
    return app;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Constraint modification

/// The two halves of the first splittable top-level conjunct of φ: u ≠ v
/// over Int gives u < v and u > v, a ∨ b gives a and b.
inline std::optional<std::pair<Term, Term>> split_constraint(const Term& phi) {
  const auto parts = theory::conjuncts(phi);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto op = theory::op_of(parts[i]);
    std::optional<std::pair<Term, Term>> halves;
    const auto ab = parts[i].args();
    if (op == Builtin::Neq && ab[0].type() == Type::int_sort())
      halves.emplace(theory::lt(ab[0], ab[1]), theory::gt(ab[0], ab[1]));
    else if (op == Builtin::Or)
      halves.emplace(ab[0], ab[1]);
    if (!halves) continue;
    auto rebuild = [&](const Term& piece) {
      std::vector<Term> ps = parts;
      ps[i] = piece;
      return theory::conj(ps);
    };
    return std::make_pair(rebuild(halves->first), rebuild(halves->second));
  }
  return std::nullopt;
}

/// Splits each selected SDP with a splittable constraint once. `only`
/// restricts the SDPs considered; by default all are.
inline std::optional<Application> constraint_modification(const DpProblem& P, const Context& ctx,
                                                          const std::vector<bool>* only = nullptr) {
  DpProblem out{{}, P.flag};
  SplitWitness w;
  for (std::size_t k = 0; k < P.size(); ++k) {
    const Sdp& p = P.sdps[k];
    auto halves = (only && !(*only)[k]) ? std::nullopt : split_constraint(p.constraint);
    if (!halves) {
      out.sdps.push_back(p);
      continue;
    }
    Sdp a = p, b = p;
    a.constraint = halves->first;
    b.constraint = halves->second;
    a.id = b.id = 0;
    a = ctx.intern(a);
    b = ctx.intern(b);
    w.splits.push_back({p.id, {a.id, b.id}});
    out.sdps.push_back(std::move(a));
    out.sdps.push_back(std::move(b));
  }
  if (w.splits.empty()) return std::nullopt;
  return Application{"constraint modification", std::move(w), {std::move(out)}};
}

// ---------------------------------------------------------------------------
// Reachability

/// Keeps the SDPs reachable from a public SDP. pu problems only.
inline std::optional<Application> reachability(const DpProblem& P, const Context& ctx) {
  if (P.flag != Flag::Pu || P.empty()) return std::nullopt;
  std::vector<std::size_t> sources;
  for (std::size_t k = 0; k < P.size(); ++k)
    if (is_public(P.sdps[k], ctx.system.hidden)) sources.push_back(k);
  if (sources.size() == P.size()) return std::nullopt;
  const Graph g = build_graph(P.sdps, ctx.system, ctx.solver);
  const auto keep = reachable_from(g, sources);
  if (std::all_of(keep.begin(), keep.end(), [](bool b) { return b; })) return std::nullopt;
  ReachWitness w;
  for (auto s : sources) w.sources.push_back(P.sdps[s].id);
  w.removed = detail::ids(P.sdps, keep, false);
  return Application{"reachability", std::move(w), {DpProblem{detail::select(P.sdps, keep), Flag::Pu}}};
}

// ---------------------------------------------------------------------------
// Reduction pairs

/// A constrained reduction pair, supplied from outside. None is built in.
struct ReductionPair {
  std::string name;
  /// s ≻ t [φ] L
  std::function<bool(const Term&, const Term&, const Term&, const VarSet&)> orient_strict;
  /// s ⪰ t [φ] L
  std::function<bool(const Term&, const Term&, const Term&, const VarSet&)> orient_weak;
  /// ℓ ⪰ r [φ] Var(φ) ∪ (Var(r) \ Var(ℓ)) for every rule.
  std::function<bool(const Lcstrs&)> orient_rules;
};

/// Removes the strictly oriented SDPs. Not sound for pu problems, which
/// are rejected.
inline std::optional<Application> reduction_pair(const DpProblem& P, const Context& ctx, const ReductionPair& rp) {
  if (P.flag == Flag::Pu || P.empty() || !rp.orient_rules || !rp.orient_rules(ctx.system)) return std::nullopt;
  std::vector<bool> strict(P.size());
  for (std::size_t k = 0; k < P.size(); ++k) {
    const Sdp& p = P.sdps[k];
    strict[k] = rp.orient_strict && rp.orient_strict(p.lhs, p.rhs, p.constraint, p.lvars);
    if (!strict[k] && !(rp.orient_weak && rp.orient_weak(p.lhs, p.rhs, p.constraint, p.lvars))) return std::nullopt;
  }
  if (std::none_of(strict.begin(), strict.end(), [](bool b) { return b; })) return std::nullopt;
  PairWitness w{rp.name, detail::ids(P.sdps, strict)};
  return Application{"reduction pair", std::move(w), {DpProblem{detail::select(P.sdps, strict, false), Flag::An}}};
}

}  // namespace lctrs
