#include "support.hpp"

#include <gtest/gtest.h>

namespace lctrs {
namespace {

using testing::term;

const Type I = Type::int_sort();

TEST(Mark, ReplacesADefinedHead) {
  const Lcstrs s = testing::load("gcdlist.lctrs");
  EXPECT_EQ(to_string(mark(term("gcd m n", s), s)), "gcd♯ m n");
  EXPECT_EQ(to_string(mark(term("fold f y l", s), s)), "fold♯ f y l");
  EXPECT_THROW(mark(term("cons x l", s), s), std::invalid_argument);
  EXPECT_EQ(mark(term("gcd m n", s), s).type().name(), "dp");
}

TEST(GenAll, GcdListYieldsTheSixPairs) {
  const Lcstrs s = testing::load("gcdlist.lctrs");
  const DpProblem P = gen_all(s);
  EXPECT_EQ(P.flag, Flag::An);
  const std::vector<std::string> want = {
      "gcdlist♯ _x1_1 ⇒ gcd♯ _y1_1_1 _y1_1_2 [true] {}",
      "gcdlist♯ _x1_1 ⇒ fold♯ gcd 0 _x1_1 [true] {}",
      "fold♯ f y (cons x l) ⇒ fold♯ f y l [true] {}",
      "gcd♯ m n ⇒ gcd♯ (-m) n [m < 0] {m}",
      "gcd♯ m n ⇒ gcd♯ m (-n) [n < 0] {n}",
      "gcd♯ m n ⇒ gcd♯ n (m mod n) [m >= 0 /\\ n > 0] {m, n}",
  };
  EXPECT_EQ(testing::strings(P.sdps), want);
  for (std::size_t i = 0; i < P.sdps.size(); ++i) EXPECT_EQ(P.sdps[i].id, i + 1);
}

TEST(GenSdps, PerRuleCounts) {
  const Lcstrs s = testing::load("gcdlist.lctrs");
  // gcd m 0 -> m has no defined symbol on the right; fold's step rule has
  // a variable head, so only the inner fold call counts.
  EXPECT_TRUE(gen_sdps(s.rules[5], 5, s).empty());
  EXPECT_EQ(gen_sdps(s.rules[2], 2, s).size(), 1u);
  EXPECT_TRUE(gen_sdps(s.rules[1], 1, s).empty());
}

TEST(GenAll, FactorialWithInit) {
  const Lcstrs s = testing::load("fact_init.lctrs");
  const DpProblem P = gen_all(s, Flag::Pu);
  EXPECT_EQ(P.flag, Flag::Pu);
  const std::vector<std::string> want = {
      "fact♯ n k ⇒ comp♯ k ((*) n) _y2_1_3 [n != 0] {n}",
      "fact♯ n k ⇒ fact♯ (n - 1) (comp k ((*) n)) [n != 0] {n}",
      "init♯ k ⇒ fact♯ 42 k [true] {}",
  };
  EXPECT_EQ(testing::strings(P.sdps), want);
  EXPECT_FALSE(is_public(P.sdps[0], s.hidden));
  EXPECT_TRUE(is_public(P.sdps[2], s.hidden));
  EXPECT_TRUE(is_public(P.sdps[0], {}));
}

TEST(GenAll, EmptyRuleSet) {
  Lcstrs s;
  EXPECT_TRUE(gen_all(s).empty());
}

TEST(GenAll, IsDeterministic) {
  testing::SystemGen a(8), b(8);
  for (int n = 0; n < 50; ++n)
    EXPECT_EQ(testing::strings(gen_all(a.next()).sdps), testing::strings(gen_all(b.next()).sdps));
}

// Shape invariants over random systems: both sides are fully applied
// marked terms, L covers the constraint and holds only theory variables,
// and marks occur only at the head.
TEST(GenAll, PairsSatisfyTheShapeInvariants) {
  testing::SystemGen gen(41);
  auto marked_inside = [](const Term& t) {
    for (const auto& a : t.args())
      for (const auto& u : subterms(a))
        if (u.head().is_symbol() && u.head().symbol().is_marked()) return true;
    return false;
  };
  for (int n = 0; n < 150; ++n) {
    const Lcstrs s = gen.next();
    for (const auto& p : gen_all(s).sdps) {
      for (const Term* side : {&p.lhs, &p.rhs}) {
        ASSERT_TRUE(side->head().is_symbol());
        const Symbol f = side->head().symbol();
        EXPECT_TRUE(f.is_marked());
        EXPECT_EQ(side->num_args(), f.type().arity()) << to_string(p);
        EXPECT_FALSE(marked_inside(*side)) << to_string(p);
      }
      EXPECT_TRUE(s.is_defined(*s.signature.find(p.rhs_head().name()))) << to_string(p);
      for (const auto& x : free_vars(p.constraint)) EXPECT_TRUE(p.lvars.contains(x)) << to_string(p);
      for (const auto& x : p.lvars) EXPECT_TRUE(x.type.is_theory_sort()) << to_string(p);
    }
  }
}

TEST(AlphaEquivalent, RenamingIsIgnored) {
  const Lcstrs s = testing::load("gcdlist.lctrs");
  const Sdp p = gen_all(s).sdps[3];
  const Term a = Term::var("a", I), m = Term::var("m", I);
  Sdp q = p;
  q.lhs = apply_subst(p.lhs, {{m.variable(), a}});
  q.rhs = apply_subst(p.rhs, {{m.variable(), a}});
  q.constraint = apply_subst(p.constraint, {{m.variable(), a}});
  q.lvars = {a.variable()};
  EXPECT_TRUE(alpha_equivalent(p, q));
  q.lvars = {};
  EXPECT_FALSE(alpha_equivalent(p, q));
  EXPECT_FALSE(alpha_equivalent(p, gen_all(s).sdps[4]));
}

TEST(Chains, GcdListExampleChainIsFound) {
  const Lcstrs s = testing::load("gcdlist.lctrs");
  const DpProblem P = gen_all(s);
  ChainOptions opts;
  opts.max_len = 4;
  opts.pool = {term("nil", s), theory::num(42), theory::num(24), theory::num(18), theory::num(6)};
  const auto chains = enumerate_chains(P.sdps, s, opts);
  auto value = [](const Substitution& sigma, const char* name) {
    auto it = sigma.find(Variable{name, I});
    return it == sigma.end() ? std::string("?") : to_string(it->second);
  };
  bool found = false;
  for (const auto& c : chains) {
    if (c.size() != 4 || c[0].sdp != 0 || c[1].sdp != 5 || c[2].sdp != 5 || c[3].sdp != 5) continue;
    if (value(c[0].sigma, "_y1_1_1") != "42" || value(c[0].sigma, "_y1_1_2") != "24") continue;
    found = found || (value(c[1].sigma, "m") == "42" && value(c[1].sigma, "n") == "24" &&
                      value(c[2].sigma, "m") == "24" && value(c[2].sigma, "n") == "18" &&
                      value(c[3].sigma, "m") == "18" && value(c[3].sigma, "n") == "6");
  }
  EXPECT_TRUE(found);
}

TEST(Chains, TrivialCases) {
  const Lcstrs s = testing::load("gcdlist.lctrs");
  ChainOptions opts;
  opts.max_len = 3;
  opts.pool = {theory::num(1)};
  const auto none = enumerate_chains({}, s, opts);
  ASSERT_EQ(none.size(), 1u);
  EXPECT_TRUE(none[0].empty());
  // (2) ends in fold♯ and no lhs of {(2)} is headed by fold♯.
  const auto single = enumerate_chains({gen_all(s).sdps[1]}, s, opts);
  for (const auto& c : single) EXPECT_LE(c.size(), 1u);
}

// Each link respects its SDP and is reachable from the previous one.
TEST(Chains, LinksReverify) {
  testing::SystemGen gen(12);
  for (int n = 0; n < 30; ++n) {
    const Lcstrs s = gen.next();
    const auto P = gen_all(s).sdps;
    ChainOptions opts;
    opts.max_len = 2;
    opts.max_chains = 20000;
    opts.pool = testing::value_pool(s, -1, 1);
    std::unordered_map<Term, std::unordered_set<Term, TermHash>, TermHash> reach;
    for (const auto& c : enumerate_chains(P, s, opts)) {
      for (const auto& l : c) EXPECT_TRUE(respects(l.sigma, P[l.sdp]));
      if (c.size() != 2) continue;
      const Term from = apply_subst(P[c[0].sdp].rhs, c[0].sigma);
      auto it = reach.find(from);
      if (it == reach.end()) {
        const auto r = reachable_terms(s, from, opts.max_steps, detail::values_in(opts.pool), opts.max_terms);
        it = reach.emplace(from, std::unordered_set<Term, TermHash>(r.begin(), r.end())).first;
      }
      EXPECT_TRUE(it->second.contains(apply_subst(P[c[1].sdp].lhs, c[1].sigma)));
    }
  }
}

}  // namespace
}  // namespace lctrs
