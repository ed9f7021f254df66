#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "core/error.hpp"
#include "core/relaxation.hpp"
#include "oracle.hpp"

using namespace logikon;

namespace {

std::vector<double> canon(const char* c) { return oracle::canonical().at(c); }

double bool_value(const char* c, double x, double y) {
  const std::string s = c;
  if (s == "and") return x * y;
  if (s == "or") return std::max(x, y);
  return 1.0 - x;
}

}  // namespace

TEST(Temperature, RejectsNonPositiveAndNonFinite) {
  for (double bad : {0.0, -1.0, std::nan(""), double(INFINITY)}) {
    EXPECT_THROW((void)Temperature(bad), Error) << bad;
  }
  EXPECT_EQ(Temperature(2.5).value(), 2.5);
}

TEST(Sigmoid, StableAtExtremes) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_EQ(sigmoid(1000.0), 1.0);
  EXPECT_EQ(sigmoid(-1000.0), 0.0);
  EXPECT_TRUE(std::isfinite(sigmoid(-745.0)));
  for (double z : {-30.0, -5.0, -0.3, 0.7, 4.0, 30.0}) {
    EXPECT_NEAR(sigmoid(z), static_cast<double>(oracle::sigmoid(z)), 2.3e-16) << z;
  }
}

TEST(CanonicalKernel, Constants) {
  EXPECT_EQ(canonical_kernel("and", 2).params, canon("and"));
  EXPECT_EQ(canonical_kernel("or", 2).params, canon("or"));
  EXPECT_EQ(canonical_kernel("not", 1).params, canon("not"));
  EXPECT_EQ(canonical_kernel("nand", 2).params, (std::vector<double>{1, 1, 0}));
  const GateKernel k = canonical_kernel("and", 2);
  EXPECT_EQ(k.parameter_count(), 3U);
  EXPECT_EQ(k.bias(), -1.5);
}

TEST(GateEval, Examples) {
  const double one_one[] = {1, 1};
  EXPECT_NEAR(gate_eval(canon("and"), one_one, Temperature(10)), 0.9933071490757153, 1e-15);
  const double zero[] = {0};
  EXPECT_NEAR(gate_eval(canon("not"), zero, Temperature(10)), 0.9999546021312976, 1e-15);
  for (double beta : {0.5, 3.0, 17.0}) {
    const double zz[] = {0, 0};
    const double out = gate_eval(canon("or"), zz, Temperature(beta));
    EXPECT_LT(out, 0.5);
    EXPECT_NEAR(out, static_cast<double>(oracle::sigmoid(-0.5 * beta)), 1e-16);
  }
  const double short_in[] = {1};
  EXPECT_THROW(gate_eval(canon("and"), short_in, Temperature(1)), Error);
}

TEST(GateGrad, AtTheDecisionBoundary) {
  const std::vector<double> p{0.8, -1.3, 0.25};
  const double x[] = {0.5, 0.5};  // 0.4 - 0.65 + 0.25 = 0
  const GateGradient g = gate_grad(p, x, Temperature(3));
  EXPECT_DOUBLE_EQ(g.value, 0.5);
  EXPECT_DOUBLE_EQ(g.inputs[0], 3 * 0.8 / 4);
  EXPECT_DOUBLE_EQ(g.inputs[1], 3 * -1.3 / 4);
  EXPECT_DOUBLE_EQ(g.params[2], 3.0 / 4);
}

TEST(GateGrad, AndAtOneOne) {
  const double x[] = {1, 1};
  const GateGradient g = gate_grad(canon("and"), x, Temperature(10));
  const long double s = oracle::sigmoid(5);
  EXPECT_NEAR(g.inputs[0], static_cast<double>(10 * s * (1 - s)), 1e-15);
  EXPECT_NEAR(g.inputs[0], 0.0664805667079, 1e-12);
}

// Central differences on random gates of every arity.
TEST(GateGrad, MatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2, 2), x01(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + trial % 3;
    std::vector<double> p(k + 1), x(k);
    for (double& v : p) v = u(rng);
    for (double& v : x) v = x01(rng);
    const Temperature beta(1 + trial % 7);
    const GateGradient g = gate_grad(p, x, beta);
    const double h = 1e-6;
    auto fd = [&](std::vector<double>& v, std::size_t i) {
      const double keep = v[i];
      v[i] = keep + h;
      const double up = gate_eval(p, x, beta);
      v[i] = keep - h;
      const double down = gate_eval(p, x, beta);
      v[i] = keep;
      return (up - down) / (2 * h);
    };
    for (std::size_t i = 0; i <= k; ++i) EXPECT_NEAR(g.params[i], fd(p, i), 1e-8);
    for (std::size_t i = 0; i < k; ++i) EXPECT_NEAR(g.inputs[i], fd(x, i), 1e-8);
  }
}

TEST(ErrorBound, Examples) {
  EXPECT_NEAR(error_bound("and", Temperature(10)), 0.0066928509242848554, 1e-17);
  EXPECT_NEAR(error_bound("or", Temperature(10)), 0.0066928509242848554, 1e-17);
  EXPECT_NEAR(error_bound("not", Temperature(10)), 4.5397868702434395e-05, 1e-19);
  EXPECT_THROW(error_bound("xor", Temperature(1)), Error);
}

TEST(ErrorBound, DecreasesInBeta) {
  for (const char* c : {"and", "or", "not"}) {
    double prev = 1.0;
    for (double beta = 0.5; beta < 200; beta *= 1.5) {
      const double b = error_bound(c, Temperature(beta));
      EXPECT_LT(b, prev);
      prev = b;
    }
  }
}

// Every vertex is within the bound; the worst vertices hit it exactly.
TEST(ErrorBound, HoldsAtEveryVertexAndIsAttained) {
  for (double beta : {1.0, 2.0, 5.0, 10.0, 20.0, 40.0}) {
    const Temperature t(beta);
    for (const char* c : {"and", "or"}) {
      const double bound = error_bound(c, t);
      double worst = 0;
      for (int m = 0; m < 4; ++m) {
        const double x[] = {double(m & 1), double(m >> 1)};
        const double err = std::abs(gate_eval(canon(c), x, t) - bool_value(c, x[0], x[1]));
        EXPECT_LE(err, bound + 1e-15);
        worst = std::max(worst, err);
      }
      EXPECT_NEAR(worst, bound, 1e-12);
    }
    for (double x : {0.0, 1.0}) {
      const double in[] = {x};
      EXPECT_NEAR(std::abs(gate_eval(canon("not"), in, t) - (1 - x)), error_bound("not", t), 1e-12);
    }
  }
}

TEST(LipschitzBound, Examples) {
  EXPECT_EQ(lipschitz_bound(0, Temperature(7)), 1.0);
  EXPECT_NEAR(lipschitz_bound(1, Temperature(4)), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(lipschitz_bound(2, Temperature(4)), 2.0, 1e-15);
}

TEST(AnnealSchedule, Examples) {
  EXPECT_EQ(anneal_schedule({1, 1, 5, ScheduleShape::linear}), (std::vector<double>{1, 1, 1, 1, 1}));
  EXPECT_EQ(anneal_schedule({1, 9, 5, ScheduleShape::linear}), (std::vector<double>{1, 3, 5, 7, 9}));
  const auto e = anneal_schedule({1, 16, 5, ScheduleShape::exponential});
  ASSERT_EQ(e.size(), 5U);
  const double expected[] = {1, 2, 4, 8, 16};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(e[i], expected[i], 1e-12);
  EXPECT_EQ(e.back(), 16.0);
  EXPECT_THROW(anneal_schedule({1, 9, 0, ScheduleShape::linear}), Error);
  EXPECT_THROW(anneal_schedule({0, 9, 3, ScheduleShape::linear}), Error);
}
