#include "helpers.hpp"
#include "tsal/errors.hpp"
#include "tsal/sobol.hpp"
#include "tsal/testbeds.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tsal;

namespace {

Vec v3(double t, double a, double b) {
  Vec v(3);
  v << t, a, b;
  return v;
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec stationary(const Vec& block, int lag) {
  Vec out(2 * lag);
  for (int i = 0; i < lag; ++i) out.segment(2 * i, 2) = block;
  return out;
}

}  // namespace

TEST(Sobol, FirstPointsMatchReference) {
  const double ref[8][5] = {{0, 0, 0, 0, 0},
                            {0.5, 0.5, 0.5, 0.5, 0.5},
                            {0.75, 0.25, 0.25, 0.25, 0.75},
                            {0.25, 0.75, 0.75, 0.75, 0.25},
                            {0.375, 0.375, 0.625, 0.875, 0.375},
                            {0.875, 0.875, 0.125, 0.375, 0.875},
                            {0.625, 0.125, 0.875, 0.625, 0.625},
                            {0.125, 0.625, 0.375, 0.125, 0.125}};
  const Mat p = sobol_points(8, 5);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 5; ++j) EXPECT_EQ(p(i, j), ref[i][j]) << i << "," << j;
  }
}

TEST(Sobol, SkipAgreesWithNext) {
  SobolSequence a(3);
  SobolSequence b(3);
  for (int i = 0; i < 37; ++i) (void)a.next();
  b.skip(37);
  EXPECT_EQ(a.next(), b.next());
  EXPECT_THROW(SobolSequence(0), InvalidArgument);
  EXPECT_THROW(SobolSequence(17), InvalidArgument);
}

TEST(Seasonal, Examples) {
  EXPECT_DOUBLE_EQ(mccormick(0.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(eval_seasonal(5.0, 0.0, 0.0, 0.0), -0.9);
  // No rotation at t = 0: plain McCormick at x / 2.
  EXPECT_NEAR(eval_seasonal(5.0, 0.0, 1.0, -2.0), -1.0 + 0.1 * mccormick(0.5, -1.0), 1e-15);
}

TEST(Seasonal, IndependentEvaluation) {
  for (double t : {0.0, 1.0, 3.7, 12.0, 40.0}) {
    for (double x1 : {-4.0, -0.3, 2.0}) {
      for (double x2 : {-3.0, 0.7, 4.0}) {
        const double th = 0.5 * std::sin(5.0 * t / 10.0);
        const double u = 0.5 * (std::cos(th) * x1 - std::sin(th) * x2);
        const double v = 0.5 * (std::sin(th) * x1 + std::cos(th) * x2);
        const double mc = std::sin(u + v) + (u - v) * (u - v) - 1.5 * u + 2.5 * v + 1.0;
        EXPECT_NEAR(eval_seasonal(5.0, t, x1, x2), -1.0 + 0.1 * mc, 1e-13);
      }
    }
  }
}

TEST(Seasonal, SlowInTime) {
  // |d theta / dt| <= a / 20, so outputs move slowly for a = 5.
  for (double t = 0.0; t < 40.0; t += 0.5) {
    EXPECT_LT(std::abs(eval_seasonal(5.0, t + 0.01, 1.0, 1.0) - eval_seasonal(5.0, t, 1.0, 1.0)), 0.01);
  }
}

TEST(Drift, Examples) {
  EXPECT_DOUBLE_EQ(drift_rosenbrock(1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(drift_rosenbrock(0.0, 0.0), 1.0);
  EXPECT_NEAR(eval_drift(0.0, 1.0, 1.0), -0.025, 1e-15);
  EXPECT_NEAR(eval_drift(0.0, 0.0, 0.0), -0.024, 1e-15);
}

TEST(Drift, SignChangeOverTime) {
  EXPECT_LT(eval_drift(249.0, 1.0, 1.0), 0.0);
  EXPECT_GT(eval_drift(251.0, 1.0, 1.0), 0.0);
}

TEST(SystemUnderTest, TimeInputSystems) {
  const auto s = SystemUnderTest::seasonal();
  EXPECT_TRUE(s.time_input());
  EXPECT_EQ(s.model_dim(), 3);
  EXPECT_EQ(s.lag(), 1);
  EXPECT_DOUBLE_EQ(s.evaluate(v3(2.0, 0.3, -0.4)), eval_seasonal(5.0, 2.0, 0.3, -0.4));
  EXPECT_DOUBLE_EQ(s.safety_indicator(v3(2.0, 0.3, -0.4)), -eval_seasonal(5.0, 2.0, 0.3, -0.4));
  const auto d = SystemUnderTest::drift();
  EXPECT_DOUBLE_EQ(d.evaluate(v3(7.0, 0.1, 0.2)), eval_drift(7.0, 0.1, 0.2));
  EXPECT_THROW((void)s.evaluate(Vec::Zero(2)), InvalidArgument);
}

TEST(SystemUnderTest, InitialRegionIsSafe) {
  for (const auto& s : {SystemUnderTest::seasonal(), SystemUnderTest::drift()}) {
    const Box& r = s.initial_safe_region();
    for (double a = 0; a <= 1.0; a += 0.125) {
      for (double b = 0; b <= 1.0; b += 0.125) {
        const Vec x = r.lower + v2(a, b).cwiseProduct(r.upper - r.lower);
        EXPECT_GT(s.safety_indicator(v3(0.0, x[0], x[1])), 0.0) << s.name();
      }
    }
  }
}

TEST(NxSurrogate, Calibration) {
  const auto s = SystemUnderTest::nx_surrogate();
  EXPECT_FALSE(s.time_input());
  EXPECT_EQ(s.lag(), 4);
  EXPECT_EQ(s.model_dim(), 8);
  EXPECT_DOUBLE_EQ(s.evaluate(stationary(v2(2250, 18.7), 4)), 12.0);
  EXPECT_LT(s.evaluate(stationary(s.initial_safe_region().center(), 4)), 18.0);
  EXPECT_GT(s.evaluate(stationary(v2(4000, 60), 4)), 18.0);
}

TEST(NxSurrogate, SafeTrajectory) {
  const auto s = SystemUnderTest::nx_surrogate();
  const Vec axes = v2(80.3, 2.17);
  const auto traj = random_safe_trajectory(s, 200, axes, 42);
  ASSERT_EQ(traj.size(), 200u);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    EXPECT_LT(s.evaluate(nx_context(traj, k, 4)), 18.0);
    EXPECT_TRUE(s.domain().contains(traj[k], 1e-9));
    if (k > 0) EXPECT_LE(((traj[k] - traj[k - 1]).array() / axes.array()).square().sum(), 1.0 + 1e-12);
  }
  EXPECT_EQ(traj, random_safe_trajectory(s, 200, axes, 42));
}

TEST(NxContext, ClampsAtStart) {
  const std::vector<Vec> traj{v2(1, 2), v2(3, 4)};
  Vec expected(6);
  expected << 3, 4, 1, 2, 1, 2;
  EXPECT_EQ(nx_context(traj, 1, 3), expected);
}

TEST(TestGrid, OnlySafePoints) {
  const auto s = SystemUnderTest::seasonal();
  const auto grid = safe_area_test_grid(s, 3.0, 21);
  EXPECT_FALSE(grid.empty());
  EXPECT_LT(grid.size(), 21u * 21u);
  for (const auto& g : grid) {
    EXPECT_LT(g.target, s.threshold());
    EXPECT_DOUBLE_EQ(g.target, eval_seasonal(5.0, 3.0, g.input[0], g.input[1]));
  }
  EXPECT_LE(safe_area_test_grid(s, 3.0, 2).size(), 4u);
  EXPECT_THROW(safe_area_test_grid(s, 3.0, 1), InvalidArgument);
}
