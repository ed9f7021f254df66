#include <cmath>
#include <cstring>
#include <random>

#include <gtest/gtest.h>

#include "core/error.hpp"
#include "core/lawvere.hpp"
#include "core/network.hpp"
#include "core/theory.hpp"
#include "oracle.hpp"

using namespace logikon;

namespace {

const Theory& bool_theory() {
  static const Theory t =
      parse_theory("theory Bool { op and: 2; op or: 2; op not: 1; }");
  return t;
}

struct Fixture {
  ParametricModel model;
  ParameterStore params;
};

Fixture canonical(double beta = 40) {
  auto [m, p] = assign_model(bool_theory(), Temperature(beta), InitSpec::canonical());
  return {std::move(m), std::move(p)};
}

Term parse(const char* s) {
  return parse_expression(s, bool_theory(), {"a", "b", "c"}).term;
}

oracle::Params params_of(const ParameterStore& p) {
  oracle::Params out;
  for (std::size_t s = 0; s < p.slots.size(); ++s) {
    const auto v = p.slot_params(s);
    out[p.slots[s].connective] = {v.begin(), v.end()};
  }
  return out;
}

const char* kLeft = "and(a, or(b, c))";
const char* kRight = "or(and(a, b), and(a, c))";

}  // namespace

TEST(AssignModel, CanonicalBoolLayout) {
  const Fixture f = canonical();
  EXPECT_EQ(f.params.values, (std::vector<double>{1, 1, -1.5, 1, 1, -0.5, -2, 1}));
  ASSERT_EQ(f.params.slots.size(), 3U);
  EXPECT_EQ(f.params.slots[2].offset, 6U);
  EXPECT_EQ(f.params.find_slot("or"), std::optional<std::size_t>(1));
  EXPECT_EQ(f.model.kernels[0].params, oracle::canonical().at("and"));
}

TEST(AssignModel, GenericConnective) {
  const Theory t = parse_theory("theory N { op nand: 2; }");
  auto [m, p] = assign_model(t, Temperature(1), InitSpec::canonical());
  EXPECT_EQ(p.values, (std::vector<double>{1, 1, 0}));
}

TEST(AssignModel, RandomIsDeterministicAndBounded) {
  auto [m1, p1] = assign_model(bool_theory(), Temperature(1), InitSpec::random(7, 0.5));
  auto [m2, p2] = assign_model(bool_theory(), Temperature(1), InitSpec::random(7, 0.5));
  auto [m3, p3] = assign_model(bool_theory(), Temperature(1), InitSpec::random(8, 0.5));
  EXPECT_EQ(p1.values, p2.values);
  EXPECT_NE(p1.values, p3.values);
  for (double v : p1.values) EXPECT_LE(std::abs(v), 0.5);
  EXPECT_EQ(store_from_model(m1).values, p1.values);
}

TEST(Compile, Variable) {
  const Fixture f = canonical();
  const NetworkGraph g = compile(f.model, Term::variable(0), 1);
  EXPECT_EQ(g.input_count(), 1U);
  EXPECT_EQ(g.gate_count(), 0U);
  EXPECT_EQ(g.depth(), 0U);
  EXPECT_EQ(g.outputs(), (std::vector<std::size_t>{0}));
  const double x[] = {0.37};
  EXPECT_EQ(evaluate(g, f.params, x, Temperature(40))[0], 0.37);
}

TEST(Compile, LeftArm) {
  const Fixture f = canonical();
  const NetworkGraph g = compile(f.model, parse(kLeft), 3);
  EXPECT_EQ(g.input_count(), 3U);
  EXPECT_EQ(g.gate_count(), 2U);
  EXPECT_EQ(g.depth(), 2U);
}

TEST(Compile, RightArmSharesTheAndSlot) {
  const Fixture f = canonical();
  const NetworkGraph g = compile(f.model, parse(kRight), 3);
  EXPECT_EQ(g.gate_count(), 3U);
  std::vector<std::size_t> and_gates;
  for (std::size_t i = g.input_count(); i < g.node_count(); ++i) {
    if (g.slots()[g.nodes()[i].index].connective == "and") and_gates.push_back(i);
  }
  ASSERT_EQ(and_gates.size(), 2U);
  EXPECT_EQ(g.nodes()[and_gates[0]].index, g.nodes()[and_gates[1]].index);
}

TEST(Compile, CommonSubtermsShareNodes) {
  const Fixture f = canonical();
  const NetworkGraph g = compile(f.model, parse("or(and(a, b), not(and(a, b)))"), 2);
  EXPECT_EQ(g.gate_count(), 3U);
}

TEST(Compile, Errors) {
  const Fixture f = canonical();
  EXPECT_THROW(compile(f.model, parse("and(a, c)"), 2), Error);
  try {
    compile(f.model, Term::apply("xor", {Term::variable(0), Term::variable(1)}), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::undeclared_connective);
  }
}

TEST(Forward, LeftArmAtVertices) {
  const Fixture f = canonical();
  const NetworkGraph g = compile(f.model, parse(kLeft), 3);
  const double x1[] = {1, 0, 1};
  EXPECT_NEAR(evaluate(g, f.params, x1, Temperature(40))[0], 1.0, 1e-6);
  const double x2[] = {0, 1, 1};
  EXPECT_NEAR(evaluate(g, f.params, x2, Temperature(40))[0], 0.0, 1e-6);
}

TEST(Forward, MatchesRecursiveOracle) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  const Fixture f = canonical();
  const oracle::Params p = params_of(f.params);
  for (const Term& t : all_terms(bool_theory(), 2, 2, 1000)) {
    const NetworkGraph g = compile(f.model, t, 2);
    for (double beta : {0.7, 4.0, 40.0}) {
      const double x[] = {u(rng), u(rng)};
      const double got = evaluate(g, f.params, x, Temperature(beta))[0];
      EXPECT_NEAR(got, static_cast<double>(oracle::relaxed(t, x, p, beta)), 1e-14) << to_string(t);
    }
  }
}

TEST(Forward, InputValidation) {
  const Fixture f = canonical();
  const NetworkGraph g = compile(f.model, parse(kLeft), 3);
  const double short_in[] = {1, 0};
  try {
    evaluate(g, f.params, short_in, Temperature(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::arity_mismatch);
  }
  const double bad[] = {1, NAN, 0};
  EXPECT_THROW(evaluate(g, f.params, bad, Temperature(1)), Error);
  ParameterStore wrong = ParameterStore::with_layout(std::vector<SlotSpec>{{"and", 2}});
  EXPECT_THROW(evaluate(g, wrong, short_in, Temperature(1)), Error);
}

TEST(Backward, IdentityGraph) {
  const Fixture f = canonical();
  const NetworkGraph g = compile(f.model, Term::variable(0), 1);
  const double x[] = {0.2};
  const double up[] = {3.5};
  Gradients gr = backward(g, f.params, forward(g, f.params, x, Temperature(2)).tape, up);
  EXPECT_EQ(gr.inputs, (std::vector<double>{3.5}));
  for (double d : gr.params) EXPECT_EQ(d, 0.0);
}

TEST(Backward, SingleGateMatchesGateGrad) {
  const Fixture f = canonical();
  const NetworkGraph g = compile(f.model, parse("and(a, b)"), 2);
  const double x[] = {0.3, 0.9};
  const double up[] = {1.0};
  Gradients gr = backward(g, f.params, forward(g, f.params, x, Temperature(5)).tape, up);
  const GateGradient gg = gate_grad(f.params.slot_params(0), x, Temperature(5));
  EXPECT_EQ(gr.inputs, gg.inputs);
  EXPECT_EQ(std::vector<double>(gr.params.begin(), gr.params.begin() + 3), gg.params);
  for (std::size_t i = 3; i < gr.params.size(); ++i) EXPECT_EQ(gr.params[i], 0.0);
}

TEST(Backward, RightArmMatchesFiniteDifferences) {
  auto [model, params] = assign_model(bool_theory(), Temperature(4), InitSpec::random(3, 1.0));
  const NetworkGraph g = compile(model, parse(kRight), 3);
  std::vector<double> x{0.3, 0.7, 0.5};
  const double up[] = {1.0};
  const Temperature beta(4);
  Gradients gr = backward(g, params, forward(g, params, x, beta).tape, up);
  const double h = 1e-6;
  auto fd = [&](std::vector<double>& v, std::size_t i) {
    const double keep = v[i];
    v[i] = keep + h;
    const double a = evaluate(g, params, x, beta)[0];
    v[i] = keep - h;
    const double b = evaluate(g, params, x, beta)[0];
    v[i] = keep;
    return (a - b) / (2 * h);
  };
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1e-6, std::abs(b)); };
  for (std::size_t i = 0; i < params.size(); ++i) {
    EXPECT_LE(rel(gr.params[i], fd(params.values, i)), 1e-5) << i;
  }
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(rel(gr.inputs[i], fd(x, i)), 1e-5) << i;
}

TEST(Backward, StaleTapeIsRejected) {
  Fixture f = canonical();
  const NetworkGraph g = compile(f.model, parse(kLeft), 3);
  const NetworkGraph h = compile(f.model, parse(kRight), 3);
  const double x[] = {0.1, 0.2, 0.3};
  const double up[] = {1.0};
  try {
    backward(h, f.params, forward(g, f.params, x, Temperature(2)).tape, up);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::stale_tape);
  }
  ForwardResult r = forward(g, f.params, x, Temperature(2));
  f.params.values[0] += 0.5;
  EXPECT_THROW(backward(g, f.params, std::move(r.tape), up), Error);
}

namespace {

// Random and/or tree in which every input is read exactly once.
Term read_once_tree(std::size_t depth, std::size_t& next, std::mt19937_64& rng) {
  if (depth == 0 || rng() % 4 == 0) return Term::variable(next++);
  const char* op = rng() % 2 ? "and" : "or";
  Term l = read_once_tree(depth - 1, next, rng);
  Term r = read_once_tree(depth - 1, next, rng);
  return Term::apply(op, {l, r});
}

double ratio(const NetworkGraph& g, const ParameterStore& p, std::span<const double> x,
             std::span<const double> y, double beta) {
  double din = 0;
  for (std::size_t i = 0; i < x.size(); ++i) din += (x[i] - y[i]) * (x[i] - y[i]);
  const double dout = evaluate(g, p, x, Temperature(beta))[0] - evaluate(g, p, y, Temperature(beta))[0];
  return std::abs(dout) / std::sqrt(din);
}

}  // namespace

// Holds for read-once and/or trees once beta >= 2 sqrt(2); below that a
// shallow leaf can outweigh the per-layer factor.
TEST(Lipschitz, ReadOnceTreesStayUnderBound) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0, 1), temp(2 * std::sqrt(2.0), 8);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 0;
    const Term t = read_once_tree(1 + trial % 3, n, rng);
    if (t.is_variable()) continue;
    const double beta = temp(rng);
    const Fixture f = canonical(beta);
    const NetworkGraph g = compile(f.model, t, n);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = unit(rng);
      y[i] = unit(rng);
    }
    EXPECT_LE(ratio(g, f.params, x, y, beta), lipschitz_bound(t.depth(), Temperature(beta)))
        << to_string(t) << " beta " << beta;
  }
}

// The canonical not gate has weight -2, so its slope reaches beta/2.
TEST(Lipschitz, NotGateExceedsBound) {
  const Fixture f = canonical(4);
  const NetworkGraph g = compile(f.model, parse("not(a)"), 1);
  const double x[] = {0.5 - 1e-4}, y[] = {0.5 + 1e-4};
  EXPECT_GT(ratio(g, f.params, x, y, 4), lipschitz_bound(1, Temperature(4)));
  EXPECT_NEAR(ratio(g, f.params, x, y, 4), 2.0, 1e-6);
}

TEST(Compose, DoubleNegationIsNearIdentity) {
  const Fixture f = canonical();
  const NetworkGraph n = compile(f.model, parse("not(a)"), 1);
  const NetworkGraph nn = compose_sequential(n, n);
  EXPECT_EQ(nn.gate_count(), 2U);
  const ParameterStore p = combine_parameters(n, f.params, n, f.params);
  for (double x : {0.0, 1.0}) {
    const double in[] = {x};
    EXPECT_NEAR(evaluate(nn, p, in, Temperature(40))[0], x, 1e-6);
  }
}

TEST(Compose, AndThenNotIsNand) {
  const Fixture f = canonical();
  const NetworkGraph a = compile(f.model, parse("and(a, b)"), 2);
  const NetworkGraph n = compile(f.model, parse("not(a)"), 1);
  const NetworkGraph nand = compose_sequential(a, n);
  const ParameterStore p = combine_parameters(a, f.params, n, f.params);
  for (int m = 0; m < 4; ++m) {
    const double in[] = {double(m & 1), double(m >> 1)};
    EXPECT_NEAR(evaluate(nand, p, in, Temperature(40))[0], m == 3 ? 0.0 : 1.0, 1e-6);
  }
  EXPECT_THROW(compose_sequential(n, a), Error);
}

TEST(Compose, ParallelNotAnd) {
  const Fixture f = canonical();
  const NetworkGraph n = compile(f.model, parse("not(a)"), 1);
  const NetworkGraph a = compile(f.model, parse("and(a, b)"), 2);
  const NetworkGraph par = compose_parallel(n, a);
  EXPECT_EQ(par.input_count(), 3U);
  const double in[] = {0, 1, 1};
  const auto out = evaluate(par, combine_parameters(n, f.params, a, f.params), in, Temperature(40));
  ASSERT_EQ(out.size(), 2U);
  EXPECT_NEAR(out[0], 1.0, 1e-6);
  EXPECT_NEAR(out[1], 1.0, 1e-6);
}

TEST(Compose, DifferentSlotTablesAreConcatenated) {
  const Fixture f = canonical();
  const Theory nt = parse_theory("theory N { op not: 1; }");
  auto [nm, np] = assign_model(nt, Temperature(1), InitSpec::canonical());
  np.values = {-3, 2};
  const NetworkGraph a = compile(f.model, parse("and(a, b)"), 2);
  const NetworkGraph n = compile(nm, Term::apply("not", {Term::variable(0)}), 1);
  const NetworkGraph g = compose_sequential(a, n);
  const ParameterStore p = combine_parameters(a, f.params, n, np);
  EXPECT_EQ(p.size(), f.params.size() + 2);
  const double in[] = {0.4, 0.8};
  const double inner = evaluate(a, f.params, in, Temperature(3))[0];
  const double in2[] = {inner};
  EXPECT_EQ(evaluate(g, p, in, Temperature(3))[0], evaluate(n, np, in2, Temperature(3))[0]);
}

TEST(ExtractModel, RoundTripIsBitIdentical) {
  auto [model, params] = assign_model(bool_theory(), Temperature(4), InitSpec::random(9, 2.0));
  const NetworkGraph g = compile(model, parse(kLeft), 3);
  const ParametricModel back = extract_model(g, params, Temperature(4), "Bool");
  const NetworkGraph g2 = compile(back, parse(kLeft), 3);
  const ParameterStore p2 = store_from_model(back);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 100; ++i) {
    const double x[] = {u(rng), u(rng), u(rng)};
    const double a = evaluate(g, params, x, Temperature(4))[0];
    const double b = evaluate(g2, p2, x, Temperature(4))[0];
    EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
  }
}

TEST(ExtractModel, CanonicalKernels) {
  const Fixture f = canonical();
  const NetworkGraph g = compile(f.model, parse(kRight), 3);
  const ParametricModel m = extract_model(g, f.params, Temperature(40));
  ASSERT_EQ(m.kernels.size(), 3U);
  for (const GateKernel& k : m.kernels) {
    EXPECT_EQ(k.params, oracle::canonical().at(k.connective)) << k.connective;
  }
}

TEST(UnshareGate, GivesOneGateAPrivateSlot) {
  const Fixture f = canonical();
  const NetworkGraph g = compile(f.model, parse(kRight), 3);
  std::size_t and_node = 0;
  for (std::size_t i = g.input_count(); i < g.node_count(); ++i) {
    if (g.slots()[g.nodes()[i].index].connective == "and") and_node = i;
  }
  auto [g2, p2] = unshare_gate(g, f.params, and_node);
  EXPECT_EQ(g2.slots().size(), 4U);
  EXPECT_EQ(p2.size(), 11U);
  const double x[] = {0.2, 0.6, 0.9};
  EXPECT_EQ(evaluate(g, f.params, x, Temperature(3))[0], evaluate(g2, p2, x, Temperature(3))[0]);
  EXPECT_THROW(extract_model(g2, p2, Temperature(3)), Error);
  EXPECT_THROW(unshare_gate(g, f.params, 0), Error);
}
