#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "core/lawvere.hpp"
#include "core/network_io.hpp"
#include "core/verifier.hpp"
#include "oracle.hpp"

using namespace logikon;

namespace {

const Theory& bool_theory() {
  static const Theory t = parse_theory(R"(
    theory Bool {
      op and: 2; op or: 2; op not: 1;
      axiom comm_and: and(x, y) = and(y, x);
      axiom distrib: and(x, or(y, z)) = or(and(x, y), and(x, z));
      axiom de_morgan: not(and(x, y)) = or(not(x), not(y));
      axiom refl: x = x;
    })");
  return t;
}

ParameterStore canonical_params(const Theory& t) {
  return assign_model(t, Temperature(1), InitSpec::canonical()).second;
}

NetworkBundle left_arm(double beta) {
  const auto e = parse_expression("and(a, or(b, c))", bool_theory());
  return bundle_expression(bool_theory(), e.term, e.variables, beta);
}

}  // namespace

TEST(TruthTableCheck, VariableHasNoDeviation) {
  const NetworkBundle b = bundle_expression(bool_theory(), Term::variable(0), {"x"}, 0.5);
  const CheckEntry e = truth_table_check(b.graph, Term::variable(0), 1, b.params, Temperature(0.5), 0);
  EXPECT_TRUE(e.passed);
  EXPECT_EQ(e.measured, 0.0);
}

TEST(TruthTableCheck, LeftArmAtHighTemperature) {
  const NetworkBundle b = left_arm(40);
  const CheckEntry e =
      truth_table_check(b.graph, b.expressions[0], 3, b.params, Temperature(40), 1e-6);
  EXPECT_TRUE(e.passed);
  EXPECT_NEAR(e.measured, 2.0611537881243797e-09, 1e-15);
}

TEST(TruthTableCheck, LeftArmAtLowTemperatureFailsWithWitness) {
  const NetworkBundle b = left_arm(2);
  const CheckEntry e =
      truth_table_check(b.graph, b.expressions[0], 3, b.params, Temperature(2), 1e-6);
  EXPECT_FALSE(e.passed);
  EXPECT_GT(e.measured, 0.1);
  EXPECT_LT(e.measured, 0.5);
  EXPECT_NEAR(e.measured, 0.38648369564127285, 1e-14);
  ASSERT_FALSE(e.witnesses.empty());
  const auto worst = std::max_element(
      e.witnesses.begin(), e.witnesses.end(), [](const Witness& a, const Witness& b) {
        return std::abs(a.measured - a.expected) < std::abs(b.measured - b.expected);
      });
  EXPECT_EQ(worst->input, (std::vector<double>{1, 0, 0}));
  EXPECT_EQ(worst->expected, 0.0);
}

TEST(TruthSweep, SmallSweepAgreesWithOracle) {
  const SweepResult r = truth_sweep(bool_theory(), 2, 2, Temperature(40), Temperature(60));
  EXPECT_EQ(r.terms, all_terms(bool_theory(), 2, 2, 1000).size());
  EXPECT_EQ(r.threshold_mismatches, 0U);
  // Independent recursion over the same family.
  long double worst = 0;
  for (const Term& t : all_terms(bool_theory(), 2, 2, 1000)) {
    for (std::uint64_t m = 0; m < 4; ++m) {
      const double x[] = {double(m & 1), double(m >> 1)};
      const long double out = oracle::relaxed(t, x, oracle::canonical(), 40);
      worst = std::max(worst, std::abs(out - (oracle::boolean(t, m) ? 1.0L : 0.0L)));
    }
  }
  EXPECT_NEAR(r.max_deviation, static_cast<double>(worst), 1e-15);
  EXPECT_LE(r.max_deviation, 1e-6);
}

TEST(ArmEquivalence, IdenticalGraphsAreExact) {
  const NetworkBundle b = left_arm(3);
  const CheckEntry e = arm_equivalence_check(b.graph, b.params, b.graph, b.params, Temperature(3),
                                             {1e-15, 32, 1});
  EXPECT_TRUE(e.passed);
  EXPECT_EQ(e.measured, 0.0);
}

TEST(ArmEquivalence, DistributivityArms) {
  const NetworkBundle b = bundle_axiom(bool_theory(), *bool_theory().find_axiom("distrib"), 40);
  const CheckEntry e = arm_equivalence_check(b.graph, b.params, Temperature(40));
  EXPECT_TRUE(e.passed);
  EXPECT_LE(e.measured, 1e-6);
}

TEST(ArmEquivalence, BrokenSharingIsDetected) {
  const NetworkBundle b = bundle_axiom(bool_theory(), *bool_theory().find_axiom("distrib"), 40);
  const std::size_t right = b.graph.outputs()[1];
  const std::size_t and_node = b.graph.args(right)[0];
  auto [g, p] = unshare_gate(b.graph, b.params, and_node);
  p.values[p.slots.back().offset] += 1e-3;
  const CheckEntry e = arm_equivalence_check(g, p, Temperature(40));
  EXPECT_FALSE(e.passed);
  ASSERT_FALSE(e.witnesses.empty());
  EXPECT_FALSE(e.witnesses[0].note.empty());
}

TEST(BoundCheck, PassesOnTheStandardGrid) {
  const double betas[] = {1, 2, 5, 10, 20, 40};
  const CheckEntry e = bound_check_lemma32(betas);
  EXPECT_TRUE(e.passed) << e.details.dump();
  EXPECT_LE(e.measured, 1e-12);
}

TEST(BoundCheck, RejectsConnectivesWithoutBound) {
  const double betas[] = {1};
  const std::string xor_only[] = {"xor"};
  EXPECT_THROW(bound_check_lemma32(betas, xor_only), Error);
}

// Least squares of log(dev) - d log(L(beta)) against beta, computed from the
// recursive oracle.
TEST(Envelope, FitMatchesIndependentRegression) {
  const Theory& t = bool_theory();
  const ParameterStore params = canonical_params(t);
  const double betas[] = {4, 8, 16, 32};
  for (const char* name : {"distrib", "de_morgan"}) {
    const Axiom& ax = *t.find_axiom(name);
    const EnvelopeFit fit = measure_envelope(t, ax, params, betas);
    const std::size_t d = std::max(ax.lhs.depth(), ax.rhs.depth());
    EXPECT_EQ(fit.depth, d);
    std::vector<double> ys;
    for (std::size_t k = 0; k < 4; ++k) {
      long double dev = 0;
      for (std::uint64_t m = 0; m < (1U << ax.context_size); ++m) {
        std::vector<double> x(ax.context_size);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = (m >> i) & 1U;
        const long double l = oracle::relaxed(ax.lhs, x, oracle::canonical(), betas[k]);
        const long double r = oracle::relaxed(ax.rhs, x, oracle::canonical(), betas[k]);
        dev = std::max(dev, std::abs(l - r));
      }
      EXPECT_NEAR(fit.deviations[k], static_cast<double>(dev), 1e-15 + 1e-9 * double(dev));
      ys.push_back(std::log(double(dev)) -
                   double(d) * std::log(betas[k] * std::sqrt(2.0) / 4));
    }
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      mx += betas[k] / 4;
      my += ys[k] / 4;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      sxy += (betas[k] - mx) * (ys[k] - my);
      sxx += (betas[k] - mx) * (betas[k] - mx);
    }
    ASSERT_TRUE(fit.alpha.has_value());
    EXPECT_NEAR(*fit.alpha, -sxy / sxx, 1e-6) << name;
    EXPECT_GE(*fit.alpha, 0.5) << name;
    EXPECT_TRUE(bound_check_thm42(t, ax, params, betas).passed) << name;
  }
}

TEST(Envelope, DepthZeroAxiomHasNoDeviation) {
  const Theory& t = bool_theory();
  const double betas[] = {4, 8, 16, 32};
  const CheckEntry e = bound_check_thm42(t, *t.find_axiom("refl"), canonical_params(t), betas);
  EXPECT_TRUE(e.passed);
  EXPECT_EQ(e.measured, 0.0);
}

TEST(Roundtrip, DistributivityArms) {
  const NetworkBundle b = bundle_axiom(bool_theory(), *bool_theory().find_axiom("distrib"), 4);
  const CheckEntry e = roundtrip_check(b.graph, b.params, b.expressions, 3, Temperature(4), 100, 1);
  EXPECT_TRUE(e.passed);
  EXPECT_EQ(e.measured, 0.0);
}

TEST(ForwardIdentity, DetectsAChangedBias) {
  const NetworkBundle b = left_arm(4);
  ParameterStore tampered = b.params;
  tampered.values[2] += 1e-9;
  const CheckEntry e = forward_identity_check("identity", b.graph, b.params, b.graph, tampered,
                                              Temperature(4), 16, 1);
  EXPECT_FALSE(e.passed);
  ASSERT_FALSE(e.witnesses.empty());
  EXPECT_NE(e.witnesses[0].measured, e.witnesses[0].expected);
}

TEST(Functoriality, HoldsOnBool) {
  const CheckEntry e = functoriality_check(bool_theory(), Temperature(8), {});
  EXPECT_TRUE(e.passed) << e.details.dump();
  EXPECT_LE(e.measured, 1e-12);
}

TEST(Census, BoolTwoVariablesMatchesClosureOracle) {
  for (std::size_t d = 0; d <= 3; ++d) {
    const Census c = census(bool_theory(), 2, d, Temperature(60), 1000000);
    const auto expected = oracle::closure({"and", "or", "not"}, 2, d);
    EXPECT_EQ(std::set<std::uint64_t>(c.reachable.begin(), c.reachable.end()), expected) << d;
    EXPECT_EQ(c.class_tables, c.reachable);
    EXPECT_TRUE(c.members_agree);
    EXPECT_TRUE(c.classes_distinct);
  }
}

TEST(Census, AndOnlyCannotReachXor) {
  const Theory t = parse_theory("theory A { op and: 2; }");
  for (std::size_t d = 0; d <= 3; ++d) {
    const Census c = census(t, 2, d, Temperature(60), 1000000);
    const auto expected = oracle::closure({"and"}, 2, d);
    EXPECT_EQ(std::set<std::uint64_t>(c.reachable.begin(), c.reachable.end()), expected);
    EXPECT_FALSE(std::binary_search(c.reachable.begin(), c.reachable.end(), 0b0110U));
  }
}

TEST(Census, SingleVariableDepthZero) {
  const Census c = census(bool_theory(), 1, 0, Temperature(60), 100);
  EXPECT_EQ(c.reachable, (std::vector<std::uint64_t>{0b10}));
  EXPECT_EQ(c.classes, 1U);
}

TEST(VerifyTheory, AllSuitesOnBool) {
  const VerificationReport r = verify_theory(bool_theory(), {});
  EXPECT_TRUE(r.all_passed()) << r.to_table();
  const auto j = r.to_json();
  EXPECT_TRUE(j["all_passed"].get<bool>());
  std::set<std::string> names;
  for (const auto& c : j["checks"]) names.insert(c["name"].get<std::string>());
  for (const char* n : {"lemma32", "census", "functor", "envelope:distrib", "arms:distrib"}) {
    EXPECT_TRUE(names.count(n)) << n;
  }
}

TEST(VerifyTheory, LowTemperatureTruthFails) {
  VerifyOptions o;
  o.suites = {"truth"};
  o.beta_grid = {2};
  const VerificationReport r = verify_theory(bool_theory(), o);
  EXPECT_FALSE(r.all_passed());
  for (const CheckEntry& e : r.entries) {
    if (!e.passed) EXPECT_FALSE(e.witnesses.empty()) << e.name;
  }
}

TEST(VerifyTheory, UnknownSuiteIsRejected) {
  VerifyOptions o;
  o.suites = {"nonsense"};
  EXPECT_THROW(verify_theory(bool_theory(), o), Error);
}
