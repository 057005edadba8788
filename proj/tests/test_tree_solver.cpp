#include <gtest/gtest.h>

#include <cmath>

#include "bdsde/errors.hpp"
#include "bdsde/oracle.hpp"
#include "bdsde/tree_solver.hpp"

namespace bdsde {
namespace {

LevelValues level(int j, std::vector<double> y, std::vector<double> z) {
  return LevelValues{j, std::move(y), std::move(z)};
}

ProblemSpec custom(Coefficient f, Coefficient g, double K, double alpha = 0.0) {
  ProblemSpec s;
  s.name = "custom";
  s.f = std::move(f);
  s.g = std::move(g);
  s.K = K;
  s.alpha = alpha;
  return s;
}

// Independent root finder for the monotone map Theta(y) = y - f(y) delta.
template <class F>
double bisect(F theta, double rhs, double lo, double hi) {
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (theta(mid) < rhs ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(TerminalLayer, IdentityHasUnitGradient) {
  const TimeGrid g(1.0, 8);
  const auto lv = terminal_layer(builtin("zero"), g);
  ASSERT_EQ(lv.y.size(), 9U);
  for (int i = 0; i <= 8; ++i) {
    EXPECT_DOUBLE_EQ(lv.y[i], g.node_value(8, i));
    EXPECT_NEAR(lv.z[i], 1.0, 1e-14);
  }
}

TEST(TerminalLayer, ConstantAndSquare) {
  auto s = builtin("zero");
  s.phi = TerminalFunctional::constant(3.0);
  const auto c = terminal_layer(s, TimeGrid(1.0, 5));
  for (double y : c.y) EXPECT_EQ(y, 3.0);
  for (double z : c.z) EXPECT_EQ(z, 0.0);

  s.phi = TerminalFunctional::square();
  const auto sq = terminal_layer(s, TimeGrid(0.5, 2));  // delta = 0.25
  EXPECT_EQ(sq.y, (std::vector<double>{1.0, 0.0, 1.0}));
  EXPECT_DOUBLE_EQ(sq.z[1], 0.0);
  EXPECT_DOUBLE_EQ(sq.z[0], -1.0);
  EXPECT_DOUBLE_EQ(sq.z[2], 1.0);
}

TEST(TerminalLayer, PathDependentRejected) {
  auto s = builtin("zero");
  s.phi = TerminalFunctional::path_sum(1.0);
  EXPECT_THROW(terminal_layer(s, TimeGrid(1.0, 4)), UnsupportedModel);
}

TEST(ThetaInvert, ZeroGeneratorIsIdentity) {
  const auto r = theta_invert(0.37, 5.0, 0.0, builtin("zero"), TimeGrid(1.0, 4));
  EXPECT_EQ(r.y, 0.37);
  EXPECT_EQ(r.iterations, 0);
}

TEST(ThetaInvert, LinearClosedForm) {
  const auto s = custom(Coefficient::linear(0.5, 1.0), Coefficient::zero(), 1.0);
  const auto r = theta_invert(1.0, 2.0, 0.0, s, TimeGrid(0.1, 1));
  EXPECT_NEAR(r.y, 1.2 / 0.95, 1e-15);
  EXPECT_NEAR(r.y, 1.263157894736842, 1e-15);
  EXPECT_EQ(r.iterations, 0);
}

TEST(ThetaInvert, SineFixedPointMatchesBisection) {
  const auto s = builtin("sine");
  const TimeGrid g(0.1, 1);
  const auto r = theta_invert(1.0, 0.3, 0.0, s, g);
  EXPECT_LT(std::abs(r.y - 0.1 * std::sin(r.y) - 1.0), 1e-12);
  const double oracle = bisect([](double y) { return y - 0.1 * std::sin(y); }, 1.0, 0.0, 2.0);
  EXPECT_NEAR(r.y, oracle, 1e-12);
  EXPECT_GT(r.iterations, 0);

  EXPECT_EQ(theta_invert(0.0, 4.0, 0.0, s, g).y, 0.0);
}

TEST(ThetaInvert, NonConvergenceIsReported) {
  const auto s = builtin("sine");
  EXPECT_THROW(theta_invert(1.0, 0.0, 0.0, s, TimeGrid(0.5, 1), 1e-15, 2), NumericFailure);
}

TEST(ImplicitStep, MidpointAndSlope) {
  const auto next = level(1, {-1.0, 1.0}, {0.0, 0.0});
  const auto out = implicit_step(next, 1, builtin("zero"), TimeGrid(1.0, 1));
  ASSERT_EQ(out.level, 0);
  EXPECT_DOUBLE_EQ(out.z[0], 1.0);
  EXPECT_DOUBLE_EQ(out.y[0], 0.0);
}

TEST(ImplicitStep, LinearGeneratorClosedForm) {
  const auto s = custom(Coefficient::linear(0.5, 0.0), Coefficient::zero(), 0.5);
  const auto out = implicit_step(level(1, {1.0, 1.0}, {0.0, 0.0}), -1, s, TimeGrid(0.1, 1));
  EXPECT_NEAR(out.y[0], 1.0 / 0.95, 1e-15);
  EXPECT_NEAR(out.y[0], 1.0526315789473684, 1e-15);
}

TEST(ImplicitStep, SineAgainstBisection) {
  const auto s = builtin("sine");
  auto flat = s;
  flat.g = Coefficient::zero();
  // Y+ = Y- = 1 and g = 0 gives rhs = 1.
  const auto out = implicit_step(level(1, {1.0, 1.0}, {0.0, 0.0}), 1, flat, TimeGrid(0.1, 1));
  EXPECT_LT(std::abs(out.y[0] - 0.1 * std::sin(out.y[0]) - 1.0), 1e-12);
  const double oracle = bisect([](double y) { return y - 0.1 * std::sin(y); }, 1.0, 0.0, 2.0);
  EXPECT_NEAR(out.y[0], oracle, 1e-12);
}

TEST(ImplicitStep, FailureCarriesNode) {
  auto s = builtin("sine");
  SolveOptions opts;
  opts.tol = 1e-16;
  opts.max_iterations = 1;
  try {
    implicit_step(level(2, {0.3, 1.0, 2.0}, {0.0, 0.0, 0.0}), 1, s, TimeGrid(1.0, 4), opts);
    FAIL();
  } catch (const NumericFailure& e) {
    EXPECT_EQ(e.level(), 1);
    EXPECT_EQ(e.node(), 0);
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(SolveBackward, TransportGolden) {
  const TimeGrid g(1.0, 4);
  const Signs eps{1, -1, 1, 1};
  SolveOptions opts;
  opts.keep_tree = true;
  const auto r = solve_backward(builtin("transport"), g, eps, opts);
  EXPECT_NEAR(r.y0, 1.0, 1e-15);
  EXPECT_NEAR(r.z0, 1.0, 1e-15);
  for (int j = 0; j <= 4; ++j) {
    double suffix = 0.0;
    for (int m = j; m < 4; ++m) suffix += g.sqrt_delta() * eps[m];
    for (int i = 0; i <= j; ++i) {
      EXPECT_NEAR(r.levels[j].y[i], g.node_value(j, i) + suffix, 1e-14);
      EXPECT_NEAR(r.levels[j].z[i], 1.0, 1e-14);
    }
  }
}

TEST(SolveBackward, AdditiveNoise) {
  const double c[] = {0.5};
  const auto s = builtin("additive", c);
  const TimeGrid g(2.0, 9);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto eps = sample_path(g, seed).eps;
    // E[W_T] = 0, so y0 is the scaled noise sum.
    EXPECT_NEAR(solve_backward(s, g, eps).y0, 0.5 * scaled_partial_sums(eps, g).back(), 1e-14);
  }
  EXPECT_THROW(builtin("additive", std::vector<double>{1.0, 2.0}), InvalidArgument);
}

TEST(SolveBackward, TimeIntegralGolden) {
  const TimeGrid g(1.0, 4);
  const Signs eps(4, 1);
  SolveOptions opts;
  opts.keep_tree = true;
  const auto r = solve_backward(builtin("time_integral"), g, eps, opts);
  EXPECT_NEAR(r.y0, 1.25, 1e-15);
  for (const auto& lv : r.levels) {
    for (double z : lv.z) EXPECT_EQ(z, 0.0);
  }
}

TEST(SolveBackward, ZeroModelIsWalkMartingale) {
  const TimeGrid g(1.0, 16);
  const auto r = solve_backward(builtin("zero"), g, sample_path(g, 3).eps);
  EXPECT_NEAR(r.y0, 0.0, 1e-14);
  EXPECT_NEAR(r.z0, 1.0, 1e-14);
}

TEST(SolveBackward, RejectsBadInputs) {
  const TimeGrid g(1.0, 4);
  EXPECT_THROW(solve_backward(builtin("zero"), g, Signs{1, 1, 1}), InvalidArgument);
  EXPECT_THROW(solve_backward(builtin("zero"), g, Signs{1, 0, 1, 1}), InvalidArgument);
  EXPECT_THROW(solve_backward(builtin("sine"), TimeGrid(1.0, 1), Signs{1}), StepTooCoarse);
}

TEST(SolveBackward, TransportExactForManyPaths) {
  for (int n : {1, 2, 7, 32, 100, 256}) {
    const TimeGrid g(1.0, n);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const NoisePath p = sample_path(g, seed);
      SolveOptions opts;
      opts.keep_tree = true;
      const auto r = solve_backward(builtin("transport"), g, p.eps, opts);
      const auto B = walk_values(p, g).B;
      double worst = 0.0;
      for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= j; ++i) {
          const double exact = g.node_value(j, i) + (B[n] - B[j]);
          worst = std::max(worst, std::abs(r.levels[j].y[i] - exact));
          worst = std::max(worst, std::abs(r.levels[j].z[i] - 1.0));
        }
      }
      EXPECT_LT(worst, 1e-12) << "n=" << n;
    }
  }
}

TEST(SolveBackward, TimeIntegralMatchesOracle) {
  for (int n : {4, 9, 64, 256}) {
    const TimeGrid g(1.0, n);
    const NoisePath p = sample_path(g, 11);
    const auto r = solve_backward(builtin("time_integral"), g, p.eps);
    EXPECT_NEAR(r.y0, exact_time_integral(g, p).y_path.front(), 1e-12);
    EXPECT_EQ(r.z0, 0.0);
  }
}

TEST(SolveBackward, SchemeResidualOnBuiltins) {
  for (const auto& name : builtin_names()) {
    const TimeGrid g(1.0, 16);
    for (std::uint64_t s = 0; s < 5; ++s) {
      const NoisePath p = sample_path(g, s);
      SolveOptions opts;
      opts.keep_tree = true;
      const auto r = solve_backward(builtin(name), g, p.eps, opts);
      EXPECT_LT(scheme_residual(builtin(name), g, p.eps, r), 1e-12) << name;
      EXPECT_LE(r.residual, 1e-12);
    }
  }
}

TEST(SolveBackward, GradientWhenGVanishes) {
  auto s = builtin("sine");
  s.g = Coefficient::zero();
  const TimeGrid g(1.0, 12);
  SolveOptions opts;
  opts.keep_tree = true;
  const auto r = solve_backward(s, g, sample_path(g, 5).eps, opts);
  for (int j = 0; j < 12; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double slope =
          (r.levels[j + 1].y[i + 1] - r.levels[j + 1].y[i]) / (2 * g.sqrt_delta());
      EXPECT_EQ(r.levels[j].z[i], slope);
    }
  }
}

TEST(SolveBackward, TrackedPathMatchesTree) {
  const auto s = builtin("sine");
  const TimeGrid g(1.0, 10);
  const NoisePath p = sample_path(g, 8);
  SolveOptions opts;
  opts.keep_tree = true;
  opts.track_beta = p.beta;
  const auto r = solve_backward(s, g, p.eps, opts);
  int node = 0;
  for (int j = 0; j <= 10; ++j) {
    if (j > 0 && p.beta[j - 1] > 0) ++node;
    EXPECT_EQ(r.path_y[j], r.levels[j].y[node]);
    EXPECT_EQ(r.path_z[j], r.levels[j].z[node]);
  }
}

TEST(SolveBackward, PsiTerminalRule) {
  const double p[] = {0.0, 0.0, 0.3, 0.5};
  const auto s = builtin("linear", p);
  const TimeGrid g(1.0, 6);
  const NoisePath path = sample_path(g, 1);
  SolveOptions opts;
  opts.keep_tree = true;
  opts.terminal_z = TerminalZRule::psi_fixed_point;
  const auto r = solve_backward(s, g, path.eps, opts);
  const auto& top = r.levels[6];
  const auto& below = r.levels[5];
  const double e = path.eps[5];
  for (int i = 0; i <= 5; ++i) {
    const double z = below.z[i];
    const double expect = (top.y[i + 1] - top.y[i]) / (2 * g.sqrt_delta()) +
                          0.5 * (s.g(1.0, top.y[i + 1], z) - s.g(1.0, top.y[i], z)) * e;
    EXPECT_NEAR(z, expect, 1e-12);
  }
}

}  // namespace
}  // namespace bdsde
