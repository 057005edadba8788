#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bdsde/errors.hpp"
#include "bdsde/model.hpp"

namespace bdsde {
namespace {

ProblemSpec with_constants(double K, double alpha) {
  ProblemSpec s = builtin("zero");
  s.K = K;
  s.alpha = alpha;
  return s;
}

TEST(ValidateSpec, AcceptsContractingStep) {
  const auto v = validate_spec(with_constants(2.0, 0.5), TimeGrid(1.0, 4));
  EXPECT_DOUBLE_EQ(v.contraction, 0.5);
  EXPECT_TRUE(v.warnings.empty());
}

TEST(ValidateSpec, StepTooCoarseNamesMinimalN) {
  try {
    validate_spec(with_constants(5.0, 0.5), TimeGrid(1.0, 4));
    FAIL() << "expected StepTooCoarse";
  } catch (const StepTooCoarse& e) {
    EXPECT_EQ(e.min_steps(), 6);
  }
  // Brute-force check of the minimal n formula.
  for (double K : {0.5, 1.0, 2.3, 5.0, 7.9}) {
    for (double T : {0.5, 1.0, 3.0}) {
      int brute = 1;
      while (T / brute * K >= 1.0) ++brute;
      try {
        validate_spec(with_constants(K, 0.1), TimeGrid(T, 1));
        EXPECT_EQ(brute, 1);
      } catch (const StepTooCoarse& e) {
        EXPECT_EQ(e.min_steps(), brute) << "K=" << K << " T=" << T;
      }
    }
  }
}

TEST(ValidateSpec, AlphaGate) {
  EXPECT_THROW(validate_spec(with_constants(0.0, 1.0), TimeGrid(1.0, 4)), InvalidModel);
  const auto v = validate_spec(builtin("transport"), TimeGrid(1.0, 4));
  EXPECT_EQ(v.warnings.size(), 1U);
}

TEST(Builtin, Registry) {
  const auto transport = builtin("transport");
  EXPECT_TRUE(transport.exactness_only);
  EXPECT_EQ(transport.K, 0.0);
  EXPECT_EQ(transport.alpha, 1.0);
  EXPECT_EQ(transport.g(0.3, 2.0, 5.0), 5.0);
  EXPECT_EQ(transport.f(0.3, 2.0, 5.0), 0.0);

  const auto ti = builtin("time_integral");
  EXPECT_TRUE(ti.flags().g_time_dependent);
  EXPECT_FALSE(ti.flags().f_depends_y);
  EXPECT_EQ(ti.g(0.75, 9.0, 9.0), 0.75);
  EXPECT_EQ(ti.phi.at_terminal(3.0), 0.0);

  const double p[] = {0.3, 0.2, 0.1, 0.2};
  const auto lin = builtin("linear", p);
  EXPECT_DOUBLE_EQ(lin.f(0.0, 1.0, 2.0), 0.3 + 0.4);
  EXPECT_DOUBLE_EQ(lin.g(0.0, 1.0, 2.0), 0.1 + 0.4);
  EXPECT_DOUBLE_EQ(lin.K, 0.3);
  EXPECT_DOUBLE_EQ(lin.alpha, 0.2);

  const auto sine = builtin("sine");
  EXPECT_DOUBLE_EQ(sine.f(0.0, 1.0, 0.0), std::sin(1.0));
  EXPECT_DOUBLE_EQ(sine.g(0.0, 2.0, 7.0), 1.0);

  const auto zero = builtin("zero");
  EXPECT_EQ(zero.f(0.1, 1.0, 1.0), 0.0);
  EXPECT_EQ(zero.g(0.1, 1.0, 1.0), 0.0);

  EXPECT_THROW(builtin("nope"), NotFound);
  const double bad[] = {1.0};
  EXPECT_THROW(builtin("linear", bad), InvalidArgument);
}

TEST(Builtin, PureAndStable) {
  for (const auto& name : builtin_names()) {
    const auto a = builtin(name);
    const auto b = builtin(name);
    EXPECT_EQ(a.K, b.K);
    EXPECT_EQ(a.alpha, b.alpha);
    EXPECT_EQ(a.f.describe(), b.f.describe());
    EXPECT_EQ(a.g.describe(), b.g.describe());
    EXPECT_EQ(a.phi.describe(), b.phi.describe());
  }
}

// Declared (K, alpha) must bound every sampled difference quotient.
TEST(Builtin, LipschitzAudit) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> arg(-10.0, 10.0);
  std::uniform_real_distribution<double> time(0.0, 1.0);
  for (const auto& name : builtin_names()) {
    const auto s = builtin(name);
    for (int k = 0; k < 10000; ++k) {
      const double t = time(rng);
      const double y1 = arg(rng), y2 = arg(rng), z1 = arg(rng), z2 = arg(rng);
      const double slack = 1e-12 * (1 + std::abs(y1) + std::abs(y2) + std::abs(z1) + std::abs(z2));
      const double df = std::abs(s.f(t, y1, z1) - s.f(t, y2, z2));
      EXPECT_LE(df, s.K * (std::abs(y1 - y2) + std::abs(z1 - z2)) + slack) << name;
      const double dg = std::abs(s.g(t, y1, z1) - s.g(t, y2, z2));
      EXPECT_LE(dg, s.K * std::abs(y1 - y2) + s.alpha * std::abs(z1 - z2) + slack) << name;
    }
  }
}

TEST(Coefficient, TabulatedAffine) {
  const auto c = Coefficient::tabulated_affine({0.0, 0.5}, {1.0, 2.0}, {3.0, 4.0});
  EXPECT_DOUBLE_EQ(c(0.2, 1.0, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(c(0.5, 1.0, 1.0), 6.0);
  EXPECT_DOUBLE_EQ(c(0.9, 2.0, 0.0), 4.0);
  EXPECT_DOUBLE_EQ(c.lipschitz_y(), 2.0);
  EXPECT_DOUBLE_EQ(c.lipschitz_z(), 4.0);
  EXPECT_TRUE(c.depends_on_t());
  EXPECT_THROW(Coefficient::tabulated_affine({0.5, 0.1}, {1, 1}, {1, 1}), InvalidArgument);
  EXPECT_THROW(Coefficient::tabulated_affine({0.0}, {1, 1}, {1}), InvalidArgument);
}

TEST(Coefficient, StateAffine) {
  const auto c = Coefficient::state_affine(1.0, 2.0);
  EXPECT_DOUBLE_EQ(c(0.0, 5.0, 5.0, 3.0), 7.0);
  EXPECT_TRUE(c.depends_on_x());
  EXPECT_FALSE(c.depends_on_y());
}

TEST(TerminalFunctional, Kinds) {
  const TimeGrid g(1.0, 4);
  const std::vector<double> walk{0.0, 0.5, 1.0, 0.5, 0.0};
  EXPECT_EQ(TerminalFunctional::identity().at_terminal(0.7), 0.7);
  EXPECT_EQ(TerminalFunctional::constant(2.0).at_terminal(0.7), 2.0);
  EXPECT_DOUBLE_EQ(TerminalFunctional::call(0.5).at_terminal(0.7), 0.2);
  EXPECT_EQ(TerminalFunctional::call(0.5).at_terminal(0.2), 0.0);
  EXPECT_DOUBLE_EQ(TerminalFunctional::square().at_terminal(-3.0), 9.0);
  const auto ps = TerminalFunctional::path_sum(2.0);
  EXPECT_TRUE(ps.path_dependent());
  EXPECT_DOUBLE_EQ(ps.over_path(walk, g), 2.0 * 0.5 * 2.0);
  EXPECT_THROW(ps.at_terminal(1.0), UnsupportedModel);
  EXPECT_EQ(TerminalFunctional::identity().over_path(walk, g), 0.0);
}

}  // namespace
}  // namespace bdsde
