#include "support.hpp"

#include <gtest/gtest.h>

namespace lctrs {
namespace {

using testing::term;

const Type I = Type::int_sort();

bool has_message(const std::vector<Diagnostic>& ds, const std::string& text) {
  for (const auto& d : ds)
    if (d.message.find(text) != std::string::npos) return true;
  return false;
}

TEST(Validate, CorpusSystemsAreWellFormed) {
  for (const char* name : {"gcdlist.lctrs", "fact_cps.lctrs", "fact_init.lctrs", "applam.lctrs", "complst.lctrs"})
    EXPECT_TRUE(validate(testing::load(name)).empty()) << name;
}

TEST(Validate, BareVariableLhs) {
  const Term x = Term::var("x", I);
  Lcstrs s;
  s.rules.push_back({x, x, theory::truth()});
  const auto ds = validate(s);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].to_string(), "rule 1: lhs is a bare variable");
}

TEST(Validate, FreshRhsVariableOfNonTheorySort) {
  Lcstrs s;
  const Type il = s.signature.add_sort("intlist");
  const Symbol f = s.signature.add_symbol("f", Type::arrow(I, il));
  s.rules.push_back({Term::app(Term::sym(f), Term::var("x", I)), Term::var("y", il), theory::truth()});
  EXPECT_TRUE(has_message(validate(s), "fresh rhs variable of non-theory sort"));
}

TEST(Validate, FreshRhsVariableOfTheorySortIsAllowed) {
  const Lcstrs s = testing::system_from("fun f : Int -> Int; f x -> y [y > x];");
  EXPECT_TRUE(validate(s).empty());
  EXPECT_EQ(s.rules[0].value_vars().size(), 2u);
}

TEST(Validate, OtherRuleShapes) {
  Lcstrs s;
  const Symbol f = s.signature.add_symbol("f", Type::arrow(I, I));
  const Term x = Term::var("x", I);
  const Term F = Term::var("F", Type::arrow(I, I));
  s.rules.push_back({Term::app(F, x), x, theory::truth()});
  s.rules.push_back({theory::add(x, theory::num(1)), x, theory::truth()});
  s.rules.push_back({Term::app(Term::sym(f), Term::app(Term::sym(f), x)), x, theory::truth()});
  s.rules.push_back({Term::app(Term::sym(f), x), x, theory::add(x, x)});
  s.hidden.insert("g");
  const auto ds = validate(s);
  EXPECT_TRUE(has_message(ds, "lhs head is a variable"));
  EXPECT_TRUE(has_message(ds, "theory symbol"));
  EXPECT_TRUE(has_message(ds, "constraint is not a logical constraint"));
  EXPECT_TRUE(has_message(ds, "hidden symbol g is not declared"));
  // f (f x) is a pattern: its subterms are applications of symbols or variables.
  for (const auto& d : ds) EXPECT_NE(d.rule, std::optional<std::size_t>(2)) << d.to_string();
}

TEST(Match, ExamplesFromTheSystem) {
  const Lcstrs s = testing::load("gcdlist.lctrs");
  const auto sigma = match(term("gcd m n", s), term("gcd 42 24", s));
  ASSERT_TRUE(sigma);
  EXPECT_EQ(sigma->at(Variable{"m", I}), theory::num(42));
  EXPECT_EQ(sigma->at(Variable{"n", I}), theory::num(24));
  EXPECT_FALSE(match(term("fold f y nil", s), term("fold gcd 0 (cons 1 nil)", s)));
  const Term t = term("cons 1 nil", s);
  const Term l = Term::var("l", t.type());
  EXPECT_EQ(match(l, t)->at(l.variable()), t);
}

TEST(Match, NonLinearPatternsNeedEqualInstances) {
  const Lcstrs s = testing::system_from("fun g : Int -> Int -> Int;");
  EXPECT_TRUE(match(term("g x x", s), term("g 1 1", s)));
  EXPECT_FALSE(match(term("g x x", s), term("g 1 2", s)));
}

// Soundness and completeness against enumeration of every substitution
// drawn from a small pool of ground terms.
TEST(Match, AgreesWithExhaustiveEnumeration) {
  testing::SystemGen gen(99);
  for (int n = 0; n < 60; ++n) {
    const Lcstrs s = gen.next();
    // Covers the literals 0..2 that generated patterns use.
    const auto pool = testing::value_pool(s, -1, 2);
    for (const auto& rule : s.rules) {
      const Term p = rule.lhs;
      std::vector<Variable> vars;
      for (const auto& x : free_vars(p)) vars.push_back(x);
      std::vector<std::vector<Term>> choices;
      for (const auto& x : vars) {
        choices.emplace_back();
        for (const auto& v : pool)
          if (v.type() == x.type) choices.back().push_back(v);
      }
      // Every instance matches with exactly its substitution.
      std::set<Term, TermLess> instances;
      std::vector<std::size_t> idx(vars.size(), 0);
      bool empty = false;
      for (const auto& c : choices) empty = empty || c.empty();
      for (bool done = empty; !done;) {
        Substitution sigma;
        for (std::size_t k = 0; k < vars.size(); ++k) sigma[vars[k]] = choices[k][idx[k]];
        const Term inst = apply_subst(p, sigma);
        instances.insert(inst);
        const auto m = match(p, inst);
        ASSERT_TRUE(m) << to_string(p) << " vs " << to_string(inst);
        EXPECT_EQ(apply_subst(p, *m), inst);
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == choices[k].size()) idx[k++] = 0;
        done = k == idx.size();
      }
      // Terms of the same shape that are not instances do not match.
      for (const auto& other : s.rules) {
        if (!(other.lhs.type() == p.type())) continue;
        Substitution ground;
        for (const auto& x : free_vars(other.lhs))
          for (const auto& v : pool)
            if (v.type() == x.type) {
              ground[x] = v;
              break;
            }
        const Term t = apply_subst(other.lhs, ground);
        if (!is_ground(t) || empty) continue;
        EXPECT_EQ(match(p, t).has_value(), instances.contains(t)) << to_string(p) << " vs " << to_string(t);
      }
    }
  }
}

TEST(Reducts, FactorialExamples) {
  const Lcstrs s = testing::load("fact_cps.lctrs");
  const auto rs = reducts(s, term("fact 1 id", s));
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(to_string(rs[0].term), "fact (1 - 1) (comp id ((*) 1))");
  EXPECT_EQ(rs[0].step.rule, std::optional<std::size_t>(1));
  bool found = false;
  for (const auto& r : reducts(s, term("id 1", s))) found = found || to_string(r.term) == "1";
  EXPECT_TRUE(found);
  EXPECT_TRUE(reducts(s, theory::num(42)).empty());
}

TEST(Reducts, FactorialSequenceToNormalForm) {
  const Lcstrs s = testing::load("fact_cps.lctrs");
  const std::vector<std::string> want = {
      "fact (1 - 1) (comp id ((*) 1))", "fact 0 (comp id ((*) 1))", "comp id ((*) 1) 1", "id (1 * 1)", "id 1", "1"};
  const std::vector<std::string> kinds = {"rule 2", "calc", "rule 1", "rule 3", "calc", "rule 4"};
  Term t = term("fact 1 id", s);
  for (std::size_t i = 0; i < want.size(); ++i) {
    const auto rs = reducts(s, t);
    auto it = std::find_if(rs.begin(), rs.end(), [&](const Reduct& r) { return to_string(r.term) == want[i]; });
    ASSERT_NE(it, rs.end()) << to_string(t) << " does not reduce to " << want[i];
    EXPECT_TRUE(it->step.to_string().starts_with(kinds[i])) << it->step.to_string();
    t = it->term;
  }
  EXPECT_TRUE(reducts(s, t).empty());
}

TEST(Reducts, FreshVariablesRangeOverThePool) {
  const Lcstrs s = testing::system_from("fun f : Int -> Int; f x -> y [y > x];");
  ValuePool pool;
  pool.ints = {-2, 0, 3, 5};
  std::vector<std::string> out;
  for (const auto& r : reducts(s, term("f 2", s), pool)) out.push_back(to_string(r.term));
  EXPECT_EQ(out, (std::vector<std::string>{"3", "5"}));
  EXPECT_EQ(default_value_pool(testing::load("fact_cps.lctrs")).ints, (std::vector<Integer>{-1, 0, 1}));
}

// Every reduct replays from its descriptor, keeps the type, and the
// calculation steps are exactly the κ-redexes.
TEST(Reducts, DescriptorsReplayOnRandomSystems) {
  testing::SystemGen gen(5);
  for (int n = 0; n < 80; ++n) {
    const Lcstrs s = gen.next();
    const auto pool = testing::value_pool(s, -1, 1);
    for (const auto& rule : s.rules) {
      Substitution sigma;
      for (const auto& x : free_vars(rule.lhs))
        for (const auto& v : pool)
          if (v.type() == x.type) sigma[x] = v;
      const Term t = apply_subst(rule.rhs, sigma);
      if (!is_ground(t)) continue;
      std::vector<Position> calc;
      for (const auto& r : reducts(s, t)) {
        EXPECT_EQ(r.term.type(), t.type());
        const auto again = replay(s, t, r.step);
        ASSERT_TRUE(again) << to_string(t) << " " << r.step.to_string();
        EXPECT_EQ(*again, r.term);
        if (r.step.is_calculation()) calc.push_back(r.step.position);
      }
      EXPECT_EQ(calc, theory::kappa_redexes(t)) << to_string(t);
    }
  }
}

TEST(Extension, LambdaExtensionIsHierarchicalAndPublic) {
  const Lcstrs base = testing::load("applam.lctrs");
  const auto ext = parse(testing::read_text(testing::corpus_path("applam_w.lctrs")), &base);
  ASSERT_TRUE(ext.ok());
  const auto c = check_extension(base, *ext.system);
  EXPECT_TRUE(c.hierarchical);
  EXPECT_TRUE(c.is_public);
}

TEST(Extension, RedefiningABaseSymbolIsRejected) {
  const Lcstrs base = testing::load("gcdlist.lctrs");
  const auto ext = parse("gcd m n -> m;", &base);
  ASSERT_TRUE(ext.ok());
  const auto c = check_extension(base, *ext.system);
  EXPECT_FALSE(c.hierarchical);
  EXPECT_NE(c.reason.find("redefines base symbol gcd"), std::string::npos);
}

TEST(Extension, MentioningAHiddenSymbolIsNotPublic) {
  const Lcstrs base = testing::load("fact_init.lctrs");
  ASSERT_TRUE(base.hidden.contains("fact"));
  const auto ext = parse("fun twice : (Int -> Int) -> Int; twice k -> fact 2 k;", &base);
  ASSERT_TRUE(ext.ok());
  const auto c = check_extension(base, *ext.system);
  EXPECT_TRUE(c.hierarchical);
  EXPECT_FALSE(c.is_public);
}

TEST(Extension, TypeClashIsRejected) {
  const Lcstrs base = testing::load("applam.lctrs");
  Lcstrs ext;
  ext.signature.add_symbol("app", Type::arrow(I, I));
  const auto c = check_extension(base, ext);
  EXPECT_FALSE(c.hierarchical);
  EXPECT_NE(c.reason.find("app"), std::string::npos);
}

}  // namespace
}  // namespace lctrs
