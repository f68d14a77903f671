#pragma once

// Sort orderings, accessible argument positions and accessible function
// passing.

#include "lctrs/kernel.hpp"
#include "lctrs/solver.hpp"
#include "lctrs/theory.hpp"
#include "lctrs/trs.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lctrs {

/// A quasi-ordering on sorts given by integer ranks; sorts without a rank
/// sit at rank 0.
struct SortOrdering {
  std::map<std::string, long> rank;

  long rank_of(const std::string& sort) const {
    auto it = rank.find(sort);
    return it == rank.end() ? 0 : it->second;
  }
  bool geq(const Type& a, const Type& b) const { return rank_of(a.name()) >= rank_of(b.name()); }
  bool gt(const Type& a, const Type& b) const { return rank_of(a.name()) > rank_of(b.name()); }

  std::size_t strict_pairs(const std::vector<Type>& sorts) const {
    std::size_t n = 0;
    for (const auto& a : sorts)
      for (const auto& b : sorts) n += gt(a, b);
    return n;
  }

  /// Groups from highest to lowest rank, e.g. "funlist ≻ Bool ≈ Int".
  std::string to_string(const std::vector<Type>& sorts) const {
    std::map<long, std::vector<std::string>, std::greater<>> groups;
    for (const auto& s : sorts) groups[rank_of(s.name())].push_back(s.name());
    std::string out;
    for (const auto& [r, names] : groups) {
      if (!out.empty()) out += " ≻ ";
      for (std::size_t i = 0; i < names.size(); ++i) out += (i ? " ≈ " : "") + names[i];
    }
    return out;
  }
};

/// A ⊒+ B, for a sort A and a type B.
inline bool acc_plus(const Type& a, const Type& b, const SortOrdering& ord);

/// A ⊒− B
inline bool acc_minus(const Type& a, const Type& b, const SortOrdering& ord) {
  if (!ord.gt(a, b.result_sort())) return false;
  for (const auto& bi : b.arg_types())
    if (!acc_plus(a, bi, ord)) return false;
  return true;
}

inline bool acc_plus(const Type& a, const Type& b, const SortOrdering& ord) {
  if (!ord.geq(a, b.result_sort())) return false;
  for (const auto& bi : b.arg_types())
    if (!acc_minus(a, bi, ord)) return false;
  return true;
}

/// Acc(f) as 1-based argument indices.
inline std::set<std::size_t> acc_positions(const Symbol& f, const SortOrdering& ord) {
  std::set<std::size_t> out;
  const auto args = f.type().arg_types();
  const Type result = f.type().result_sort();
  for (std::size_t i = 0; i < args.size(); ++i)
    if (acc_plus(result, args[i], ord)) out.insert(i + 1);
  return out;
}

/// The variables x with s ⊵acc x.
inline VarSet acc_subterm_vars(const Term& s, const SortOrdering& ord) {
  if (s.is_var()) return {s.variable()};
  const Term h = s.head();
  if (!h.is_symbol()) return {};
  VarSet out;
  const auto args = s.args();
  for (std::size_t k : acc_positions(h.symbol(), ord))
    if (k <= args.size())
      for (const auto& x : acc_subterm_vars(args[k - 1], ord)) out.insert(x);
  return out;
}

/// Variables in Var(ℓ) ∩ Var(r) \ Var(φ) that must be accessible.
inline VarSet afp_obligations(const Rule& r) {
  VarSet out;
  const VarSet rv = free_vars(r.rhs), cv = free_vars(r.constraint);
  for (const auto& x : free_vars(r.lhs))
    if (rv.contains(x) && !cv.contains(x)) out.insert(x);
  return out;
}

struct AfpViolation {
  std::size_t rule;
  Variable var;
};

inline std::vector<AfpViolation> afp_violations(const Lcstrs& system, const SortOrdering& ord) {
  std::vector<AfpViolation> out;
  for (std::size_t i = 0; i < system.rules.size(); ++i) {
    const Rule& r = system.rules[i];
    VarSet reach;
    for (const auto& a : r.lhs.args())
      for (const auto& x : acc_subterm_vars(a, ord)) reach.insert(x);
    for (const auto& x : afp_obligations(r))
      if (!reach.contains(x)) out.push_back({i, x});
  }
  return out;
}

inline bool is_afp_witness(const Lcstrs& system, const SortOrdering& ord) { return afp_violations(system, ord).empty(); }

struct AfpResult {
  std::optional<SortOrdering> ordering;
  std::string reason;  // set when no ordering is returned
};

namespace detail {

class AfpEncoder {
 public:
  explicit AfpEncoder(const std::vector<Type>& sorts) {
    for (const auto& s : sorts) ranks_.emplace(s.name(), Term::var("rank!" + s.name(), Type::int_sort()));
  }

  Term rank(const Type& s) {
    auto it = ranks_.find(s.name());
    if (it == ranks_.end()) it = ranks_.emplace(s.name(), Term::var("rank!" + s.name(), Type::int_sort())).first;
    return it->second;
  }

  Term plus(const Type& a, const Type& b) {
    Term out = theory::ge(rank(a), rank(b.result_sort()));
    for (const auto& bi : b.arg_types()) out = theory::conj(out, minus(a, bi));
    return out;
  }
  Term minus(const Type& a, const Type& b) {
    Term out = theory::gt(rank(a), rank(b.result_sort()));
    for (const auto& bi : b.arg_types()) out = theory::conj(out, plus(a, bi));
    return out;
  }

  /// s ⊵acc x as a constraint over the ranks.
  Term reaches(const Term& s, const Variable& x) {
    if (s.is_var()) return theory::boolean(s.variable() == x);
    const Term h = s.head();
    if (!h.is_symbol()) return theory::boolean(false);
    const auto tys = h.symbol().type().arg_types();
    const Type result = h.symbol().type().result_sort();
    const auto args = s.args();
    Term out = theory::boolean(false);
    for (std::size_t k = 0; k < args.size() && k < tys.size(); ++k) {
      if (!free_vars(args[k]).contains(x)) continue;
      out = theory::disj(out, theory::conj(plus(result, tys[k]), reaches(args[k], x)));
    }
    return out;
  }

  const std::map<std::string, Term>& ranks() const { return ranks_; }

 private:
  std::map<std::string, Term> ranks_;
};

}  // namespace detail

/// Searches for a sort ordering under which the system is AFP, preferring
/// the fewest strict pairs.
inline AfpResult find_afp_ordering(const Lcstrs& system, SmtSolver& solver) {
  const auto& sorts = system.signature.sorts();
  if (SortOrdering flat; is_afp_witness(system, flat)) return {flat, {}};

  detail::AfpEncoder enc(sorts);
  Term phi = theory::truth();
  const long top = static_cast<long>(sorts.size());
  for (const auto& s : sorts)
    phi = theory::conj(phi, theory::conj(theory::ge(enc.rank(s), theory::num(0)), theory::le(enc.rank(s), theory::num(top))));
  for (const auto& r : system.rules) {
    const auto args = r.lhs.args();
    for (const auto& x : afp_obligations(r)) {
      Term some = theory::boolean(false);
      for (const auto& a : args) some = theory::disj(some, enc.reaches(a, x));
      phi = theory::conj(phi, some);
    }
  }

  // Indicator d_{a,b} = 1 whenever a ≻ b; their sum bounds the strict pairs.
  Term count = theory::num(0);
  for (const auto& a : sorts)
    for (const auto& b : sorts) {
      if (a == b) continue;
      Term d = Term::var("strict!" + a.name() + "!" + b.name(), Type::int_sort());
      phi = theory::conj(phi, theory::conj(theory::ge(d, theory::num(0)), theory::le(d, theory::num(1))));
      phi = theory::conj(phi, theory::disj(theory::le(enc.rank(a), enc.rank(b)), theory::eq(d, theory::num(1))));
      count = theory::add(count, d);
    }

  auto read = [&](const Model& m) {
    SortOrdering ord;
    for (const auto& [name, t] : enc.ranks()) {
      auto it = m.find(t.variable());
      ord.rank[name] = it == m.end() ? 0 : static_cast<long>(std::get<Integer>(it->second));
    }
    return ord;
  };

  SatResult r = solver.check_sat(phi);
  if (r.unsat()) return {std::nullopt, "no sort ordering makes the system accessible function passing"};
  if (!r.sat()) return {std::nullopt, "sort ordering search inconclusive: " + r.reason};
  SortOrdering best = read(r.model);
  for (;;) {
    const auto k = best.strict_pairs(sorts);
    if (k == 0) break;
    SatResult next = solver.check_sat(theory::conj(phi, theory::lt(count, theory::num(static_cast<long long>(k)))));
    if (!next.sat()) break;
    SortOrdering cand = read(next.model);
    if (cand.strict_pairs(sorts) >= k) break;
    best = cand;
  }
  if (!is_afp_witness(system, best)) throw SolverError("sort ordering from the solver is not an AFP witness");
  return {best, {}};
}

}  // namespace lctrs
