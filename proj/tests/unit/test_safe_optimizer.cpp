#include "helpers.hpp"
#include "tsal/errors.hpp"
#include "tsal/safe_optimizer.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tsal;
using namespace tsal::testing;

namespace {

Vec c1(double a) { return Vec::Constant(1, a); }

GpModel motivating_model() {
  Mat x(1, 1);
  x << 1.0;
  GpModel m(SeArdKernel(c1(1.0), 1.0, 0.0), 0.0, x, Vec::Zero(1));
  m.fit();
  return m;
}

AcquisitionWorkspace motivating_ws(const GpModel& m) {
  return AcquisitionWorkspace::build(m, acq::Imspe{FiniteMeasure::diag_gaussian(c1(0.0), c1(1.0))});
}

SafetyConfig prior_safety(Eigen::Index d, double mean, double threshold) {
  GpModel m(SeArdKernel(Vec::Ones(d), 1.0, 0.0), mean);
  m.fit();
  return SafetyConfig{m, threshold};
}

}  // namespace

TEST(SafetyProbability, PriorExamples) {
  EXPECT_DOUBLE_EQ(safety_probability(prior_safety(1, 0.0, 0.0), c1(0.3)), 0.5);
  EXPECT_NEAR(safety_probability(prior_safety(1, 0.0, 2.0), c1(0.3)), 0.9772498680518208, 1e-14);
  EXPECT_NEAR(safety_probability(prior_safety(1, 1.0, 0.0), c1(0.3)), 0.15865525393145707, 1e-14);
}

TEST(SafetyProbability, DeterministicAtTrainingPoint) {
  Mat x(1, 1);
  x << 0.0;
  GpModel m(SeArdKernel(c1(1.0), 1.0, 0.0), 0.0, x, Vec::Constant(1, -1.0));
  m.fit();
  EXPECT_EQ(safety_probability(SafetyConfig{m, 0.0}, c1(0.0)), 1.0);
  EXPECT_EQ(safety_probability(SafetyConfig{m, -2.0}, c1(0.0)), 0.0);
}

TEST(SafetyMargin, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const SafetyConfig cfg{random_model(rng, 2, 6, random_kernel(rng, 2)), 0.3};
    const Vec x = random_vec(rng, 2, -2, 2);
    Vec g;
    (void)safety_margin(cfg, x, &g);
    Vec fd(2);
    for (int i = 0; i < 2; ++i) {
      Vec a = x, b = x;
      a[i] += 1e-6;
      b[i] -= 1e-6;
      fd[i] = (safety_margin(cfg, a) - safety_margin(cfg, b)) / 2e-6;
    }
    EXPECT_LT(rel_diff(g, fd, 1e-6), 1e-4);
  }
}

TEST(SafetyConfig, Validation) {
  SafetyConfig cfg = prior_safety(1, 0.0, 0.0);
  EXPECT_NO_THROW(cfg.validate());
  cfg.alpha = 1.5;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(SelectNext, MotivatingMinimizer) {
  const GpModel m = motivating_model();
  const auto ws = motivating_ws(m);
  const auto sel = select_next(ws, nullptr, step::None{}, Box{c1(-4), c1(4)}, 1);
  ASSERT_TRUE(sel.has_value());
  EXPECT_NEAR(sel->point[0], -0.5479204538, 1e-3);
  EXPECT_NEAR(sel->acquisition_value, ws.evaluate(sel->point), 1e-15);
}

TEST(SelectNext, Deterministic) {
  std::mt19937_64 rng(12);
  const GpModel m = random_model(rng, 2, 6, random_kernel(rng, 2));
  const auto ws = AcquisitionWorkspace::build(
      m, acq::Imspe{FiniteMeasure::uniform_box(Vec::Constant(2, -2), Vec::Constant(2, 2))});
  const SafetyConfig safety{m, 0.8};
  const Box domain{Vec::Constant(2, -2), Vec::Constant(2, 2)};
  const auto a = select_next(ws, &safety, step::None{}, domain, 77);
  const auto b = select_next(ws, &safety, step::None{}, domain, 77);
  ASSERT_EQ(a.has_value(), b.has_value());
  if (a) {
    EXPECT_EQ(a->point, b->point);
    EXPECT_EQ(a->run, b->run);
    EXPECT_LT(safety_margin(safety, a->point), 0.0);
  }
}

TEST(SelectNext, NothingSafe) {
  const GpModel m = motivating_model();
  const auto ws = motivating_ws(m);
  const SafetyConfig safety = prior_safety(1, 10.0, 0.0);
  SelectOptions opt;
  opt.max_rejections = 50;
  EXPECT_FALSE(select_next(ws, &safety, step::None{}, Box{c1(-4), c1(4)}, 3, opt).has_value());
}

TEST(SelectNext, StaysInsideEllipse) {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 5; ++rep) {
    const GpModel m = random_model(rng, 2, 8, random_kernel(rng, 2));
    const auto ws = AcquisitionWorkspace::build(
        m, acq::Imspe{FiniteMeasure::uniform_box(Vec::Constant(2, -3), Vec::Constant(2, 3))});
    const Vec prev = random_vec(rng, 2, -1, 1);
    const step::EllipseAroundPrevious ell{Vec::Constant(2, 0.1), prev};
    SelectOptions opt;
    opt.fallback = prev;
    const auto sel = select_next(ws, nullptr, ell, Box{Vec::Constant(2, -3), Vec::Constant(2, 3)}, rep, opt);
    ASSERT_TRUE(sel.has_value());
    EXPECT_LE(((sel->point - prev).array() / 0.1).square().sum(), 1.0 + 1e-8);
  }
}

TEST(SelectNext, MoreStartsNeverWorse) {
  std::mt19937_64 rng(14);
  for (int rep = 0; rep < 5; ++rep) {
    const GpModel m = random_model(rng, 2, 8, random_kernel(rng, 2));
    const auto ws = AcquisitionWorkspace::build(
        m, acq::Imspe{FiniteMeasure::uniform_box(Vec::Constant(2, -2), Vec::Constant(2, 2))});
    const Box domain{Vec::Constant(2, -2), Vec::Constant(2, 2)};
    SelectOptions few;
    few.starts = 1;
    SelectOptions many;
    many.starts = 6;
    const auto a = select_next(ws, nullptr, step::None{}, domain, 5, few);
    const auto b = select_next(ws, nullptr, step::None{}, domain, 5, many);
    ASSERT_TRUE(a && b);
    EXPECT_LE(b->acquisition_value, a->acquisition_value);
  }
}

TEST(IsFeasible, Regions) {
  const GpModel m = motivating_model();
  const auto ws = motivating_ws(m);
  const Box domain{c1(-4), c1(4)};
  EXPECT_TRUE(is_feasible(ws, nullptr, step::None{}, domain, c1(0.0)));
  EXPECT_FALSE(is_feasible(ws, nullptr, step::None{}, domain, c1(5.0)));
  EXPECT_FALSE(is_feasible(ws, nullptr, step::Box{c1(1.0), c1(2.0)}, domain, c1(0.0)));
  EXPECT_FALSE(is_feasible(ws, nullptr, step::EllipseAroundPrevious{c1(0.1), c1(0.5)}, domain, c1(0.0)));
  const SafetyConfig unsafe = prior_safety(1, 10.0, 0.0);
  EXPECT_FALSE(is_feasible(ws, &unsafe, step::None{}, domain, c1(0.0)));
}
