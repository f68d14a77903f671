#include "support.hpp"

#include <gtest/gtest.h>

namespace lctrs {
namespace {

using namespace theory;

const Type I = Type::int_sort();

// Independent evaluator over __int128. Euclidean division is found by
// searching for the remainder in [0, |d|).
struct Oracle {
  static __int128 div_of(__int128 n, __int128 d) {
    const __int128 ad = d < 0 ? -d : d;
    for (__int128 r = 0; r < ad; ++r)
      if ((n - r) % d == 0) return (n - r) / d;
    throw std::logic_error("no remainder");
  }
  static __int128 mod_of(__int128 n, __int128 d) { return n - d * div_of(n, d); }

  static __int128 num(const Term& t) {
    if (t.is_symbol()) return static_cast<__int128>(static_cast<long long>(t.symbol().int_value()));
    const auto a = t.args();
    switch (op_of(t)) {
      case Builtin::Add: return num(a[0]) + num(a[1]);
      case Builtin::Sub: return num(a[0]) - num(a[1]);
      case Builtin::Mul: return num(a[0]) * num(a[1]);
      case Builtin::Div: return div_of(num(a[0]), num(a[1]));
      case Builtin::Mod: return mod_of(num(a[0]), num(a[1]));
      case Builtin::Neg: return -num(a[0]);
      default: throw std::logic_error("not an integer operator");
    }
  }

  static bool truth(const Term& t) {
    if (t.is_symbol()) return t.symbol().bool_value();
    const auto a = t.args();
    switch (op_of(t)) {
      case Builtin::Lt: return num(a[0]) < num(a[1]);
      case Builtin::Le: return num(a[0]) <= num(a[1]);
      case Builtin::Gt: return num(a[0]) > num(a[1]);
      case Builtin::Ge: return num(a[0]) >= num(a[1]);
      case Builtin::Eq: return a[0].type() == I ? num(a[0]) == num(a[1]) : truth(a[0]) == truth(a[1]);
      case Builtin::Neq: return a[0].type() == I ? num(a[0]) != num(a[1]) : truth(a[0]) != truth(a[1]);
      case Builtin::And: return truth(a[0]) && truth(a[1]);
      case Builtin::Or: return truth(a[0]) || truth(a[1]);
      case Builtin::Not: return !truth(a[0]);
      default: throw std::logic_error("not a boolean operator");
    }
  }
};

long long as_ll(const Value& v) { return static_cast<long long>(std::get<Integer>(v)); }

TEST(Euclid, RemainderIsNonNegative) {
  struct Case { long long n, d, q, r; };
  for (const Case& c : {Case{7, 2, 3, 1}, Case{-7, 2, -4, 1}, Case{7, -2, -3, 1}, Case{-7, -2, 4, 1},
                        Case{6, 3, 2, 0}, Case{-6, 3, -2, 0}, Case{0, 5, 0, 0}, Case{-1, 5, -1, 4}}) {
    EXPECT_EQ(as_ll(interpret(div(num(c.n), num(c.d)))), c.q) << c.n << " div " << c.d;
    EXPECT_EQ(as_ll(interpret(mod(num(c.n), num(c.d)))), c.r) << c.n << " mod " << c.d;
  }
}

TEST(Euclid, AgreesWithSearchOracle) {
  for (long long n = -12; n <= 12; ++n)
    for (long long d = -5; d <= 5; ++d) {
      if (d == 0) continue;
      EXPECT_EQ(static_cast<long long>(euclid_div(Integer(n), Integer(d))), static_cast<long long>(Oracle::div_of(n, d)));
      EXPECT_EQ(static_cast<long long>(euclid_mod(Integer(n), Integer(d))), static_cast<long long>(Oracle::mod_of(n, d)));
    }
}

TEST(Interpret, DivisionByZeroIsAnError) {
  EXPECT_THROW(interpret(div(num(1), num(0))), EvalError);
  EXPECT_THROW(interpret(add(Term::var("x", I), num(0))), EvalError);
  EXPECT_FALSE(calculate(mod(num(3), num(0))).has_value());
}

TEST(Interpret, MatchesOracleOnRandomTerms) {
  testing::TheoryTermGen gen(11);
  for (int i = 0; i < 500; ++i) {
    const Term t = gen.int_term(3);
    EXPECT_EQ(as_ll(interpret(t)), static_cast<long long>(Oracle::num(t))) << to_string(t);
    const Term b = gen.bool_term(3);
    EXPECT_EQ(std::get<bool>(interpret(b)), Oracle::truth(b)) << to_string(b);
  }
}

TEST(Calculate, OnlyContractsRedexesWithValueArguments) {
  const Term x = Term::var("x", I);
  EXPECT_EQ(to_string(*calculate(add(num(2), num(3)))), "5");
  EXPECT_FALSE(calculate(add(x, num(3))).has_value());
  EXPECT_FALSE(calculate(add(add(num(1), num(1)), num(3))).has_value());
  EXPECT_FALSE(calculate(num(3)).has_value());
  // A partial application is not a calculation redex.
  EXPECT_FALSE(calculate(Term::app(Term::sym(builtin(Builtin::Add)), num(1))).has_value());
}

TEST(Kappa, NormalisesOnlyTheoryRedexes) {
  const Lcstrs s = testing::system_from("fun f : Int -> Int;");
  const Term t = testing::term("f (1 + 2 * 3) + f (x - 0)", s);
  EXPECT_EQ(to_string(kappa_normalize(t)), "f 7 + f (x - 0)");
  // 1 + 2 * 3 is not yet a redex; only its argument 2 * 3 is.
  const auto rs = kappa_redexes(t);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(to_string(subterm_at(t, rs[0])), "2 * 3");
}

TEST(Kappa, InnermostAndOutermostAgreeAndPreserveMeaning) {
  testing::TheoryTermGen gen(2024);
  for (int i = 0; i < 1000; ++i) {
    const Term t = (i % 2 == 0) ? gen.int_term(4) : gen.bool_term(4);
    const Term a = kappa_normalize(t), b = kappa_normalize_outermost(t);
    ASSERT_EQ(a, b) << to_string(t);
    ASSERT_TRUE(a.is_symbol()) << to_string(t);
    EXPECT_EQ(*as_value(a), interpret(t)) << to_string(t);
  }
}

TEST(TheoryTerm, RecognisesConstraints) {
  const Lcstrs s = testing::system_from("fun f : Int -> Int;");
  const Term x = Term::var("x", I);
  EXPECT_TRUE(is_theory_term(add(x, num(1))));
  EXPECT_FALSE(is_theory_term(testing::term("f x", s)));
  EXPECT_TRUE(is_logical_constraint(gt(x, num(0))));
  EXPECT_FALSE(is_logical_constraint(add(x, num(0))));
  EXPECT_TRUE(is_theory_term(add(x, num(1)), VarSet{x.variable()}));
  EXPECT_FALSE(is_theory_term(add(x, num(1)), VarSet{}));
  EXPECT_TRUE(is_ground_theory_term(add(num(2), num(1))));
  EXPECT_FALSE(is_ground_theory_term(add(x, num(1))));
}

TEST(Constraint, HoldsUnderSubstitution) {
  const Term x = Term::var("x", I), y = Term::var("y", I);
  const Term phi = conj(gt(x, num(0)), neq(y, num(0)));
  EXPECT_TRUE(constraint_holds(phi, {{x.variable(), num(1)}, {y.variable(), num(-3)}}));
  EXPECT_FALSE(constraint_holds(phi, {{x.variable(), num(0)}, {y.variable(), num(2)}}));
  EXPECT_THROW(constraint_holds(phi, {{x.variable(), num(1)}}), EvalError);
  // A constraint stuck on division by zero does not hold.
  EXPECT_FALSE(constraint_holds(eq(div(x, num(0)), num(0)), {{x.variable(), num(1)}}));
}

TEST(Conj, TruthIsAUnit) {
  const Term x = Term::var("x", I);
  const Term a = gt(x, num(0));
  EXPECT_EQ(conj(truth(), a), a);
  EXPECT_EQ(conj(a, truth()), a);
  EXPECT_EQ(conjuncts(conj(a, conj(le(x, num(3)), truth()))).size(), 2u);
}

}  // namespace
}  // namespace lctrs
