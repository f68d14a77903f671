#pragma once

// Graph approximation for a set of SDPs, strongly connected components and
// reachability.

#include "lctrs/kernel.hpp"
#include "lctrs/sdp.hpp"
#include "lctrs/solver.hpp"
#include "lctrs/theory.hpp"
#include "lctrs/trs.hpp"

#include <algorithm>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace lctrs {

/// Some rule defines f with at most n arguments.
inline bool has_rule_upto(const Lcstrs& system, const Symbol& f, std::size_t n) {
  for (const auto& r : system.rules) {
    const Term h = r.lhs.head();
    if (h.is_symbol() && h.symbol() == f && r.lhs.num_args() <= n) return true;
  }
  return false;
}

/// ζ(u, v): a constraint that must be satisfiable for some instance of u to
/// rewrite to an instance of v. u's variables in `l0` are known to be
/// instantiated by ground theory terms.
inline Term zeta(const Term& u, const Term& v, const VarSet& l0, const Lcstrs& system) {
  const Term uh = u.head();
  if (uh.is_symbol() && !has_rule_upto(system, uh.symbol(), u.num_args())) {
    const Symbol& f = uh.symbol();
    const Term vh = v.head();
    if (vh.is_symbol()) {
      const Symbol& g = vh.symbol();
      if (g == f && v.num_args() == u.num_args()) {
        const auto us = u.args(), vs = v.args();
        Term out = theory::truth();
        for (std::size_t i = 0; i < us.size(); ++i) {
          out = theory::conj(out, zeta(us[i], vs[i], l0, system));
          if (theory::is_false(out)) return out;
        }
        return out;
      }
      if (!(g == f) && (!f.is_theory() || !g.is_value())) return theory::boolean(false);
    }
  }
  if (u.type().is_base() && theory::is_theory_term(u, l0) && theory::is_theory_term(v)) return theory::eq(u, v);
  return theory::truth();
}

namespace detail {
inline Substitution rename_apart(const Sdp& p, const std::string& prefix) {
  Substitution s;
  VarSet vs = free_vars(p.lhs);
  for (const auto& x : free_vars(p.rhs)) vs.insert(x);
  for (const auto& x : p.lvars) vs.insert(x);
  for (const auto& x : vs) s.emplace(x, Term::var(prefix + x.name, x.type));
  return s;
}
inline VarSet rename_set(const VarSet& vs, const Substitution& s) {
  VarSet out;
  for (const auto& x : vs) out.insert(s.at(x).variable());
  return out;
}
}  // namespace detail

/// The query deciding the edge p0 → p1: φ0 ∧ φ1 ∧ ζ(t0♯, s1♯), after
/// renaming the two SDPs apart.
inline Term edge_query(const Sdp& p0, const Sdp& p1, const Lcstrs& system) {
  const Substitution r0 = detail::rename_apart(p0, "0!");
  const Substitution r1 = detail::rename_apart(p1, "1!");
  const Term t0 = apply_subst(p0.rhs, r0);
  const Term s1 = apply_subst(p1.lhs, r1);
  const Term z = zeta(t0, s1, detail::rename_set(p0.lvars, r0), system);
  return theory::conj(theory::conj(apply_subst(p0.constraint, r0), apply_subst(p1.constraint, r1)), z);
}

struct Graph {
  std::size_t n = 0;
  std::vector<std::vector<bool>> adj;

  explicit Graph(std::size_t size = 0) : n(size), adj(size, std::vector<bool>(size, false)) {}
  bool has_edge(std::size_t i, std::size_t j) const { return adj[i][j]; }
  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (adj[i][j]) out.emplace_back(i, j);
    return out;
  }
};

/// Edge i → j unless the edge query is unsatisfiable.
inline Graph build_graph(const std::vector<Sdp>& P, const Lcstrs& system, SmtSolver& solver) {
  Graph g(P.size());
  for (std::size_t i = 0; i < P.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j) {
      const Term q = edge_query(P[i], P[j], system);
      g.adj[i][j] = theory::is_false(q) ? false : solver.check_sat(q).maybe_sat();
    }
  return g;
}

/// Strongly connected components (Tarjan), each sorted, in the order of
/// their smallest vertex.
inline std::vector<std::vector<std::size_t>> sccs(const Graph& g) {
  std::vector<int> index(g.n, -1), low(g.n, 0);
  std::vector<bool> on_stack(g.n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  int counter = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w = 0; w < g.n; ++w) {
      if (!g.adj[v][w]) continue;
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (std::size_t v = 0; v < g.n; ++v)
    if (index[v] < 0) visit(v);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

/// Components with more than one vertex or with a self-loop.
inline std::vector<std::vector<std::size_t>> nontrivial_sccs(const Graph& g) {
  std::vector<std::vector<std::size_t>> out;
  for (auto& c : sccs(g))
    if (c.size() > 1 || g.adj[c[0]][c[0]]) out.push_back(std::move(c));
  return out;
}

/// Vertices reachable from some source by a path of length zero or more.
inline std::vector<bool> reachable_from(const Graph& g, const std::vector<std::size_t>& sources) {
  std::vector<bool> seen(g.n, false);
  std::vector<std::size_t> work;
  for (auto s : sources)
    if (!seen[s]) {
      seen[s] = true;
      work.push_back(s);
    }
  while (!work.empty()) {
    const std::size_t v = work.back();
    work.pop_back();
    for (std::size_t w = 0; w < g.n; ++w)
      if (g.adj[v][w] && !seen[w]) {
        seen[w] = true;
        work.push_back(w);
      }
  }
  return seen;
}

/// Vertices on some cycle.
inline std::vector<bool> on_cycle(const Graph& g) {
  std::vector<bool> out(g.n, false);
  for (const auto& c : nontrivial_sccs(g))
    for (auto v : c) out[v] = true;
  return out;
}

}  // namespace lctrs
