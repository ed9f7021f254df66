#include <random>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "core/boolean.hpp"
#include "core/error.hpp"
#include "core/lawvere.hpp"
#include "core/monad.hpp"
#include "core/theory.hpp"
#include "oracle.hpp"

using namespace logikon;

namespace {

const Theory& bool_theory() {
  static const Theory t = parse_theory(R"(
    theory Bool {
      op and: 2; op or: 2; op not: 1;
      axiom comm_and: and(x, y) = and(y, x);
      axiom de_morgan: not(and(x, y)) = or(not(x), not(y));
      axiom double_neg: not(not(x)) = x;
    })");
  return t;
}

Term v(std::size_t i) { return Term::variable(i); }
Term And(Term a, Term b) { return Term::apply("and", {std::move(a), std::move(b)}); }
Term Or(Term a, Term b) { return Term::apply("or", {std::move(a), std::move(b)}); }
Term Not(Term a) { return Term::apply("not", {std::move(a)}); }

Term parse(const char* s) { return parse_expression(s, bool_theory(), {"x", "y", "z"}).term; }

}  // namespace

TEST(Term, StructuralEqualityAndDepth) {
  EXPECT_EQ(And(v(0), Not(v(1))), parse("and(x, not(y))"));
  EXPECT_FALSE(And(v(0), v(1)) == And(v(1), v(0)));
  EXPECT_EQ(parse("and(x, or(y, z))").depth(), 2U);
  EXPECT_EQ(parse("and(x, or(y, z))").node_count(), 5U);
  EXPECT_EQ(parse("or(x, z)").context_bound(), 3U);
}

TEST(Term, SubstituteAndShift) {
  const Term t = And(v(0), v(1));
  const std::vector<Term> r{Not(v(1)), v(0)};
  EXPECT_EQ(substitute(t, r), And(Not(v(1)), v(0)));
  EXPECT_EQ(shift_variables(t, 2), And(v(2), v(3)));
}

TEST(Interpret, VariableIsProjection) {
  EXPECT_EQ(interpret(v(0), 2), projection(0, 2));
}

TEST(Interpret, SingleGateIsTheTermItself) {
  const TupleMorphism m = interpret(And(v(0), v(1)), 2);
  EXPECT_EQ(m.source_arity, 2U);
  ASSERT_EQ(m.target_arity(), 1U);
  EXPECT_EQ(m.components[0], And(v(0), v(1)));
}

TEST(Interpret, NestedTermIsGeneratorAfterPairing) {
  const Term t = And(Not(v(0)), v(1));
  const TupleMorphism parts[] = {interpret(Not(v(0)), 2), interpret(v(1), 2)};
  const TupleMorphism expected = compose(pairing(parts), generator({"and", 2}));
  EXPECT_EQ(interpret(t, 2), expected);
  EXPECT_EQ(interpret(t, 2).components[0], t);
}

TEST(Compose, IdentityLaws) {
  const TupleMorphism g = interpret(parse("or(and(x, y), not(x))"), 2);
  EXPECT_EQ(compose(identity_morphism(2), g), g);
  EXPECT_EQ(compose(g, identity_morphism(1)), g);
}

TEST(Compose, SwapIntoAnd) {
  const std::size_t sigma[] = {1, 0};
  const TupleMorphism swapped = compose(permutation(sigma), generator({"and", 2}));
  EXPECT_EQ(swapped.components[0], And(v(1), v(0)));
}

TEST(Compose, DeMorganRightSide) {
  const TupleMorphism nn = product(generator({"not", 1}), generator({"not", 1}));
  const TupleMorphism rhs = compose(nn, generator({"or", 2}));
  EXPECT_EQ(rhs.components[0], Or(Not(v(0)), Not(v(1))));
  const TupleMorphism lhs = compose(generator({"and", 2}), generator({"not", 1}));
  EXPECT_EQ(lhs.components[0], Not(And(v(0), v(1))));
}

TEST(Compose, ArityMismatchThrows) {
  EXPECT_THROW(compose(identity_morphism(3), generator({"and", 2})), Error);
}

TEST(Compose, Associative) {
  std::mt19937_64 rng(5);
  const std::vector<Term> pool{v(0), v(1), Not(v(0)), And(v(0), v(1)), Or(v(1), Not(v(0))),
                               And(Not(v(1)), Or(v(0), v(1)))};
  auto pick = [&](std::size_t m) {
    TupleMorphism f{2, {}};
    for (std::size_t i = 0; i < m; ++i) f.components.push_back(pool[rng() % pool.size()]);
    return f;
  };
  for (int i = 0; i < 100; ++i) {
    const TupleMorphism f = pick(2), g = pick(2), h = pick(2);
    EXPECT_EQ(compose(compose(f, g), h), compose(f, compose(g, h)));
  }
}

TEST(Structural, ProjectionDiagonalPermutation) {
  EXPECT_EQ(projection(0, 1), identity_morphism(1));
  const TupleMorphism d = diagonal(2);
  EXPECT_EQ(d.source_arity, 1U);
  EXPECT_EQ(d.components, (std::vector<Term>{v(0), v(0)}));
  // and after the diagonal is and(x, x); it agrees with x on both values.
  const Term aa = compose(d, generator({"and", 2})).components[0];
  EXPECT_EQ(aa, And(v(0), v(0)));
  EXPECT_EQ(truth_table(aa, 1), oracle::table(v(0), 1));
  // and after swap is semantically and.
  const std::size_t sigma[] = {1, 0};
  const Term swapped = compose(permutation(sigma), generator({"and", 2})).components[0];
  EXPECT_EQ(truth_table(swapped, 2), truth_table(And(v(0), v(1)), 2));
  const std::size_t bad[] = {0, 0};
  EXPECT_THROW(permutation(bad), Error);
  EXPECT_THROW(projection(2, 2), Error);
}

TEST(Boolean, TruthTablesMatchOracle) {
  for (const Term& t : all_terms(bool_theory(), 2, 2, 1000)) {
    EXPECT_EQ(truth_table(t, 2), oracle::table(t, 2)) << to_string(t);
  }
}

TEST(Boolean, UnknownConnectiveIsUnsupported) {
  try {
    evaluate_boolean(Term::apply("frob", {v(0)}), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unsupported);
  }
}

TEST(EqualModuloAxioms, DeMorganHoldsSemantically) {
  const auto r = equal_modulo_axioms(parse("not(and(x, y))"), parse("or(not(x), not(y))"),
                                     bool_theory(), EqualityMode::semantic());
  EXPECT_EQ(r.kind, EqualityVerdict::Kind::equal);
}

TEST(EqualModuloAxioms, AndVersusOrHasCountermodel) {
  const auto r = equal_modulo_axioms(parse("and(x, y)"), parse("or(x, y)"), bool_theory(),
                                     EqualityMode::semantic());
  ASSERT_EQ(r.kind, EqualityVerdict::Kind::distinct);
  EXPECT_EQ(r.countermodel, (std::vector<bool>{true, false}));
}

TEST(EqualModuloAxioms, Reflexive) {
  const auto r = equal_modulo_axioms(v(0), v(0), bool_theory(), EqualityMode::semantic());
  EXPECT_EQ(r.kind, EqualityVerdict::Kind::equal);
  const auto w = equal_modulo_axioms(v(0), v(0), bool_theory(), EqualityMode::rewriting(0));
  EXPECT_EQ(w.kind, EqualityVerdict::Kind::equal);
}

TEST(EqualModuloAxioms, RewriteFindsAxiomInstances) {
  const Theory& t = bool_theory();
  const auto dm = equal_modulo_axioms(parse("not(and(z, x))"), parse("or(not(z), not(x))"), t,
                                      EqualityMode::rewriting(1));
  EXPECT_EQ(dm.kind, EqualityVerdict::Kind::equal);
  const auto two = equal_modulo_axioms(parse("not(and(y, x))"), parse("or(not(x), not(y))"), t,
                                       EqualityMode::rewriting(2));
  EXPECT_EQ(two.kind, EqualityVerdict::Kind::equal);
  // No associativity axiom: rewriting cannot decide, and says so.
  const auto unk = equal_modulo_axioms(parse("and(x, and(y, z))"), parse("and(and(x, y), z)"), t,
                                       EqualityMode::rewriting(2));
  EXPECT_EQ(unk.kind, EqualityVerdict::Kind::unknown);
  EXPECT_EQ(unk.depth_bound, 2U);
}

// Axiom instances are congruent: substituting equal terms into a context
// preserves the verdict.
TEST(EqualModuloAxioms, CongruenceUnderContexts) {
  const Theory& t = bool_theory();
  const Term a = parse("not(and(x, y))"), b = parse("or(not(x), not(y))");
  const std::vector<Term> contexts{And(v(0), v(2)), Or(Not(v(0)), v(1)), Not(Not(v(0)))};
  for (const Term& c : contexts) {
    const std::vector<Term> ra{a, v(1), v(2)}, rb{b, v(1), v(2)};
    const auto r = equal_modulo_axioms(substitute(c, ra), substitute(c, rb), t,
                                       EqualityMode::semantic(), 3);
    EXPECT_EQ(r.kind, EqualityVerdict::Kind::equal) << to_string(c);
  }
}

TEST(Enumerate, DepthZeroIsTheVariable) {
  const auto classes = enumerate_terms(bool_theory(), 1, 0);
  ASSERT_EQ(classes.size(), 1U);
  EXPECT_EQ(classes[0].representative, v(0));
}

TEST(Enumerate, ConstantsAppearAtDepthZero) {
  const Theory t = parse_theory("theory K { op top:0; op and:2; }");
  const auto classes = enumerate_terms(t, 1, 0, {EqualityMode::rewriting(0), 100});
  EXPECT_EQ(classes.size(), 2U);
}

TEST(Enumerate, DepthOneSemanticClasses) {
  const auto classes = enumerate_terms(bool_theory(), 1, 1);
  // x, not(x), and(x,x), or(x,x): and/or collapse onto x semantically.
  ASSERT_EQ(classes.size(), 2U);
  std::set<std::uint64_t> tables;
  std::size_t members = 0;
  for (const auto& c : classes) {
    tables.insert(*c.truth_table);
    members += c.members.size();
  }
  EXPECT_EQ(tables, oracle::closure({"and", "or", "not"}, 1, 1));
  EXPECT_EQ(members, 4U);
}

TEST(Enumerate, TwoVariablesReachAllSixteenFunctions) {
  for (std::size_t d = 0; d <= 3; ++d) {
    const auto classes = enumerate_terms(bool_theory(), 2, d, {std::nullopt, 1000000});
    std::set<std::uint64_t> tables;
    for (const auto& c : classes) tables.insert(*c.truth_table);
    EXPECT_EQ(tables.size(), classes.size());
    EXPECT_EQ(tables, oracle::closure({"and", "or", "not"}, 2, d)) << "depth " << d;
    EXPECT_LE(classes.size(), 16U);
  }
  EXPECT_EQ(enumerate_terms(bool_theory(), 2, 3, {std::nullopt, 1000000}).size(), 16U);
}

// Terms of depth <= d over n variables with one unary and two binary
// connectives: T(0) = n, T(d) = n + T(d-1) + 2 T(d-1)^2.
TEST(Enumerate, TermCountsFollowTheRecurrence) {
  auto count = [](std::size_t n, std::size_t d) {
    std::size_t t = n;
    for (std::size_t k = 0; k < d; ++k) t = n + t + 2 * t * t;
    return t;
  };
  for (std::size_t n = 1; n <= 2; ++n) {
    for (std::size_t d = 0; d <= 2; ++d) {
      EXPECT_EQ(all_terms(bool_theory(), n, d, 1000).size(), count(n, d)) << n << " " << d;
    }
  }
  std::size_t streamed = 0;
  for_each_term(bool_theory(), 1, 3, [&](const Term&) { ++streamed; });
  EXPECT_EQ(streamed, count(1, 3));
}

TEST(Enumerate, BudgetIsEnforced) {
  try {
    all_terms(bool_theory(), 2, 3, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::budget_exceeded);
  }
}

TEST(Monad, UnitIsIdentityOnOneVariable) {
  const auto u = monad_unit(std::string("p"));
  EXPECT_EQ(u.operation, identity_morphism(1));
  EXPECT_EQ(u.variables, (std::vector<std::string>{"p"}));
}

TEST(Monad, UnitLaws) {
  const auto t = make_element(interpret(And(Not(v(0)), v(1)), 2),
                              std::vector<std::string>{"p", "q"});
  EXPECT_EQ(monad_mult(monad_unit(t)), t);
  EXPECT_EQ(monad_mult(monad_map(t, [](const std::string& x) { return monad_unit(x); })), t);
}

TEST(Monad, MapCommutesWithUnit) {
  auto f = [](const std::string& s) { return s + "'"; };
  EXPECT_EQ(monad_map(monad_unit(std::string("p")), f), monad_unit(std::string("p'")));
}

TEST(Monad, FlattenSubstitutesInnerTerms) {
  const auto inner1 = make_element(generator({"not", 1}), std::vector<std::string>{"p"});
  const auto inner2 = monad_unit(std::string("q"));
  const auto outer = make_element(generator({"and", 2}),
                                  std::vector<MonadElement<std::string>>{inner1, inner2});
  const auto flat = monad_mult(outer);
  EXPECT_EQ(to_string(flat), "and(not(p), q)");
  EXPECT_EQ(flat.operation.components[0], And(Not(v(0)), v(1)));
}

TEST(Monad, ArityIsChecked) {
  EXPECT_THROW(make_element(generator({"and", 2}), std::vector<int>{1}), Error);
  EXPECT_THROW(make_element(identity_morphism(2), std::vector<int>{1, 2}), Error);
}
