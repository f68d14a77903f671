#pragma once

// Static dependency pairs, DP problems and a bounded chain enumerator.

#include "lctrs/kernel.hpp"
#include "lctrs/theory.hpp"
#include "lctrs/trs.hpp"

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace lctrs {

/// f t1 ... tn  ↦  f♯ t1 ... tn, for a defined symbol f.
inline Term mark(const Term& t, const Lcstrs& system) {
  const Term h = t.head();
  if (!h.is_symbol() || !system.is_defined(h.symbol()))
    throw std::invalid_argument("cannot mark " + to_string(t) + ": head is not a defined symbol");
  return Term::apply(Term::sym(Symbol::marked(h.symbol())), t.args());
}

/// ⟨s♯ ⇒ t♯ [φ] L⟩
struct Sdp {
  Term lhs;
  Term rhs;
  Term constraint;
  VarSet lvars;
  /// Display number; 0 until assigned.
  std::size_t id = 0;

  Symbol lhs_head() const { return lhs.head().symbol(); }
  Symbol rhs_head() const { return rhs.head().symbol(); }

  /// Structural equality, ignoring the display number.
  bool same(const Sdp& o) const {
    return lhs == o.lhs && rhs == o.rhs && constraint == o.constraint && lvars == o.lvars;
  }
};

inline std::string to_string(const VarSet& vs) {
  std::string s = "{";
  bool first = true;
  for (const auto& x : vs) {
    s += (first ? "" : ", ") + x.name;
    first = false;
  }
  return s + "}";
}

inline std::string to_string(const Sdp& p) {
  std::string s = to_string(p.lhs) + " ⇒ " + to_string(p.rhs);
  s += " [" + to_string(p.constraint) + "] " + to_string(p.lvars);
  return s;
}

/// Display label "(n)" or the SDP itself when it has no number.
inline std::string label(const Sdp& p) { return p.id ? "(" + std::to_string(p.id) + ")" : to_string(p); }

enum class Flag { An, Pu };

inline const char* to_string(Flag f) { return f == Flag::An ? "an" : "pu"; }

struct DpProblem {
  std::vector<Sdp> sdps;
  Flag flag = Flag::An;

  bool empty() const { return sdps.empty(); }
  std::size_t size() const { return sdps.size(); }
};

/// heads(P): the marked symbols heading either side, in order of appearance.
inline std::vector<Symbol> heads(const std::vector<Sdp>& sdps) {
  std::vector<Symbol> out;
  auto add = [&](const Symbol& f) {
    for (const auto& g : out)
      if (g == f) return;
    out.push_back(f);
  };
  for (const auto& p : sdps) {
    add(p.lhs_head());
    add(p.rhs_head());
  }
  return out;
}

inline std::string problem_labels(const std::vector<Sdp>& sdps) {
  std::string s = "{";
  for (std::size_t i = 0; i < sdps.size(); ++i) s += (i ? ", " : "") + std::to_string(sdps[i].id);
  return s + "}";
}

// ---------------------------------------------------------------------------
// Generation

namespace detail {
inline void post_order(const Term& t, std::vector<Term>& out) {
  for (const auto& a : t.args()) post_order(a, out);
  out.push_back(t);
}
}  // namespace detail

/// SDP(ℓ → r [φ]) for rule number `rule_index` (0-based, used for fresh names).
/// Candidate subterms are visited bottom-up, arguments left to right.
inline std::vector<Sdp> gen_sdps(const Rule& rule, std::size_t rule_index, const Lcstrs& system) {
  const std::string tag = std::to_string(rule_index + 1);
  std::vector<Term> xs;
  const auto extra = rule.lhs.type().arg_types();
  for (std::size_t i = 0; i < extra.size(); ++i)
    xs.push_back(Term::var("_x" + tag + "_" + std::to_string(i + 1), extra[i]));
  const Term lhs = Term::apply(mark(rule.lhs, system), xs);
  const Term rx = Term::apply(rule.rhs, xs);
  const VarSet lvars = rule.value_vars();

  std::vector<Term> subs;
  detail::post_order(rx, subs);
  std::vector<Sdp> out;
  std::size_t count = 0;
  for (const auto& u : subs) {
    const Term h = u.head();
    if (!h.is_symbol() || !system.is_defined(h.symbol())) continue;
    ++count;
    std::vector<Term> args = u.args();
    const auto missing = u.type().arg_types();
    for (std::size_t i = 0; i < missing.size(); ++i)
      args.push_back(Term::var("_y" + tag + "_" + std::to_string(count) + "_" + std::to_string(args.size() + 1),
                               missing[i]));
    Sdp p{lhs, Term::apply(Term::sym(Symbol::marked(h.symbol())), args), rule.constraint, lvars};
    bool dup = false;
    for (const auto& q : out) dup = dup || q.same(p);
    if (!dup) out.push_back(std::move(p));
  }
  return out;
}

/// SDP(R), numbered from 1 in generation order.
inline DpProblem gen_all(const Lcstrs& system, Flag flag = Flag::An) {
  DpProblem out;
  out.flag = flag;
  for (std::size_t i = 0; i < system.rules.size(); ++i)
    for (auto& p : gen_sdps(system.rules[i], i, system)) {
      bool dup = false;
      for (const auto& q : out.sdps) dup = dup || q.same(p);
      if (dup) continue;
      p.id = out.sdps.size() + 1;
      out.sdps.push_back(std::move(p));
    }
  return out;
}

inline bool is_public(const Sdp& p, const std::set<std::string>& hidden) { return !hidden.contains(p.lhs_head().name()); }

/// σ maps L to ground theory terms and ⟦φσ⟧ = 1.
inline bool respects(const Substitution& sigma, const Sdp& p) {
  for (const auto& x : p.lvars) {
    auto it = sigma.find(x);
    if (it == sigma.end() || !theory::is_ground_theory_term(it->second)) return false;
  }
  return theory::constraint_holds(p.constraint, sigma);
}

/// Equal up to a bijective renaming of variables (which maps L onto L).
inline bool alpha_equivalent(const Sdp& a, const Sdp& b) {
  Substitution sigma;
  if (!detail::match_into(a.lhs, b.lhs, sigma) || !detail::match_into(a.rhs, b.rhs, sigma) ||
      !detail::match_into(a.constraint, b.constraint, sigma))
    return false;
  std::set<Variable> image;
  for (const auto& [x, t] : sigma) {
    if (!t.is_var() || !image.insert(t.variable()).second) return false;
  }
  if (a.lvars.size() != b.lvars.size()) return false;
  for (const auto& x : a.lvars) {
    auto it = sigma.find(x);
    const Variable y = it == sigma.end() ? x : it->second.variable();
    if (!b.lvars.contains(y)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Chains

struct ChainLink {
  std::size_t sdp;  // index into the problem
  Substitution sigma;
};

using Chain = std::vector<ChainLink>;

struct ChainOptions {
  std::size_t max_len = 2;
  /// Ground terms that instantiate variables not fixed by matching.
  std::vector<Term> pool;
  /// Rewrite steps allowed between consecutive links.
  std::size_t max_steps = 8;
  /// Bound on the terms explored per link.
  std::size_t max_terms = 2000;
  /// Bound on the chains returned.
  std::size_t max_chains = 100000;
};

namespace detail {

inline std::vector<std::vector<Term>> pool_choices(const std::vector<Variable>& vars, const std::vector<Term>& pool) {
  std::vector<std::vector<Term>> out;
  for (const auto& x : vars) {
    std::vector<Term> c;
    for (const auto& t : pool)
      if (t.type() == x.type) c.push_back(t);
    out.push_back(std::move(c));
  }
  return out;
}

/// Calls f on every extension of base to `vars` drawn from the pool.
template <typename F>
void for_each_extension(const Substitution& base, const std::vector<Variable>& vars, const std::vector<Term>& pool,
                        F&& f) {
  const auto choices = pool_choices(vars, pool);
  for (const auto& c : choices)
    if (c.empty()) return;
  std::vector<std::size_t> idx(vars.size(), 0);
  for (;;) {
    Substitution s = base;
    for (std::size_t k = 0; k < vars.size(); ++k) s[vars[k]] = choices[k][idx[k]];
    if (!f(s)) return;
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == choices[k].size()) idx[k++] = 0;
    if (k == idx.size()) return;
  }
}

inline std::vector<Variable> sdp_vars(const Sdp& p) {
  VarSet vs = free_vars(p.lhs);
  for (const auto& x : free_vars(p.rhs)) vs.insert(x);
  for (const auto& x : p.lvars) vs.insert(x);
  for (const auto& x : free_vars(p.constraint)) vs.insert(x);
  return {vs.begin(), vs.end()};
}

inline ValuePool values_in(const std::vector<Term>& pool) {
  ValuePool vp;
  vp.ints.clear();
  vp.bools.clear();
  for (const auto& t : pool) {
    if (t.is_value() && t.symbol().op() == Builtin::IntValue) vp.ints.push_back(t.symbol().int_value());
    if (t.is_value() && t.symbol().op() == Builtin::BoolValue) vp.bools.push_back(t.symbol().bool_value());
  }
  return vp;
}

}  // namespace detail

/// Terms reachable from t in at most `max_steps` steps, t included.
inline std::vector<Term> reachable_terms(const Lcstrs& system, const Term& t, std::size_t max_steps,
                                         const ValuePool& values, std::size_t max_terms) {
  std::vector<Term> out{t};
  std::unordered_set<Term, TermHash> seen{t};
  std::deque<std::pair<Term, std::size_t>> queue{{t, 0}};
  while (!queue.empty() && out.size() < max_terms) {
    auto [u, d] = queue.front();
    queue.pop_front();
    if (d == max_steps) continue;
    for (auto& r : reducts(system, u, values)) {
      if (!seen.insert(r.term).second) continue;
      out.push_back(r.term);
      queue.emplace_back(r.term, d + 1);
      if (out.size() >= max_terms) break;
    }
  }
  return out;
}

/// All (P, R)-chains of length at most opts.max_len over the pool, the
/// empty chain first. Links are found by matching the next lhs against
/// terms reachable from the previous instantiated rhs.
inline std::vector<Chain> enumerate_chains(const std::vector<Sdp>& P, const Lcstrs& system, const ChainOptions& opts) {
  std::vector<Chain> out{Chain{}};
  const ValuePool values = detail::values_in(opts.pool);

  auto instances_from = [&](std::size_t j, const Term& target, auto&& emit) {
    const Sdp& p = P[j];
    auto sigma = match(p.lhs, target);
    if (!sigma) return;
    std::vector<Variable> open;
    for (const auto& x : detail::sdp_vars(p))
      if (!sigma->contains(x)) open.push_back(x);
    detail::for_each_extension(*sigma, open, opts.pool, [&](const Substitution& s) {
      if (respects(s, p)) emit(s);
      return out.size() < opts.max_chains;
    });
  };

  std::vector<Chain> frontier;
  for (std::size_t j = 0; j < P.size() && opts.max_len > 0; ++j) {
    detail::for_each_extension({}, detail::sdp_vars(P[j]), opts.pool, [&](const Substitution& s) {
      if (respects(s, P[j])) {
        frontier.push_back(Chain{{j, s}});
        out.push_back(frontier.back());
      }
      return out.size() < opts.max_chains;
    });
  }
  for (std::size_t len = 2; len <= opts.max_len && !frontier.empty(); ++len) {
    std::vector<Chain> next;
    for (const auto& c : frontier) {
      const ChainLink& last = c.back();
      const Term start = apply_subst(P[last.sdp].rhs, last.sigma);
      const auto reach = reachable_terms(system, start, opts.max_steps, values, opts.max_terms);
      for (std::size_t j = 0; j < P.size(); ++j) {
        std::vector<Substitution> found;
        for (const auto& u : reach)
          instances_from(j, u, [&](const Substitution& s) {
            for (const auto& f : found)
              if (f == s) return;
            found.push_back(s);
          });
        for (auto& s : found) {
          Chain d = c;
          d.push_back({j, std::move(s)});
          next.push_back(d);
          out.push_back(std::move(d));
          if (out.size() >= opts.max_chains) return out;
        }
      }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace lctrs
