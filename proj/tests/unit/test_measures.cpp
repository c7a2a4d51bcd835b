#include "tsal/errors.hpp"
#include "tsal/measures.hpp"

#include <gtest/gtest.h>

using namespace tsal;

namespace {
Vec c1(double a) { return Vec::Constant(1, a); }
}  // namespace

TEST(Mass, UnitBox) { EXPECT_DOUBLE_EQ(mass(FiniteMeasure::uniform_box(c1(0), c1(1))), 1.0); }

TEST(Mass, ScaledGaussian) { EXPECT_DOUBLE_EQ(mass(FiniteMeasure::diag_gaussian(c1(0), c1(1), 3.0)), 3.0); }

TEST(Mass, WeightedSumIsLinear) {
  const auto box = FiniteMeasure::uniform_box(c1(0), c1(1));
  const auto sum = FiniteMeasure::weighted_sum({{2.0, box}, {-0.5, box}});
  EXPECT_DOUBLE_EQ(mass(sum), 1.5);
  EXPECT_FALSE(sum.non_negative());
  EXPECT_EQ(sum.kind(), MeasureKind::WeightedSum);
}

TEST(Mass, DensityTimesVolume) {
  Vec lo(2);
  Vec hi(2);
  lo << -1, 0;
  hi << 1, 3;
  EXPECT_DOUBLE_EQ(FiniteMeasure::uniform_box(lo, hi, 0.5).mass(), 3.0);
  EXPECT_DOUBLE_EQ(FiniteMeasure::uniform_probability(lo, hi, 2.0).mass(), 2.0);
}

TEST(FiniteMeasure, RejectsInvalidParameters) {
  EXPECT_THROW(FiniteMeasure::uniform_box(c1(1), c1(1)), InvalidArgument);
  EXPECT_THROW(FiniteMeasure::diag_gaussian(c1(0), c1(0)), InvalidArgument);
  const auto a = FiniteMeasure::uniform_box(c1(0), c1(1));
  const auto b = FiniteMeasure::uniform_box(Vec::Zero(2), Vec::Ones(2));
  EXPECT_THROW(FiniteMeasure::weighted_sum({{1.0, a}, {1.0, b}}), InvalidArgument);
  EXPECT_THROW(FiniteMeasure::power(a, 0), InvalidArgument);
}

TEST(FiniteMeasure, ProductAndPower) {
  const auto a = FiniteMeasure::uniform_box(c1(0), c1(2));
  const auto g = FiniteMeasure::diag_gaussian(c1(0), c1(1), 3.0);
  const auto p = FiniteMeasure::product(a, g);
  EXPECT_EQ(p.dim(), 2);
  EXPECT_DOUBLE_EQ(p.mass(), 6.0);
  const auto q = FiniteMeasure::power(a, 3);
  EXPECT_EQ(q.dim(), 3);
  EXPECT_DOUBLE_EQ(q.mass(), 8.0);
  EXPECT_DOUBLE_EQ(p.scaled(2.0).mass(), 12.0);
}

TEST(TimeSpace, DiracWindowIsSingleAtom) {
  const auto t = discrete_time_window(4.0, 0);
  EXPECT_EQ(t.terms().size(), 1u);
  EXPECT_DOUBLE_EQ(t.mass(), 1.0);
  EXPECT_DOUBLE_EQ(std::get<factor::Atom>(t.terms()[0].factors[0]).at, 4.0);
}

TEST(TimeSpace, ContinuousWindowMass) {
  const auto ts = product_time_space(continuous_time_window(0.0, 10.0),
                                     FiniteMeasure::uniform_box(Vec::Zero(2), Vec::Ones(2)));
  EXPECT_DOUBLE_EQ(ts.mass(), 10.0);
  EXPECT_EQ(ts.joint.dim(), 3);
}

TEST(TimeSpace, DiscreteWindowMass) {
  const auto ts = product_time_space(discrete_time_window(0.0, 10),
                                     FiniteMeasure::uniform_box(Vec::Zero(2), Vec::Ones(2)));
  EXPECT_DOUBLE_EQ(ts.mass(), 11.0);
}

TEST(TimeSpace, TimePartMustBeOneDimensional) {
  const auto two = FiniteMeasure::uniform_box(Vec::Zero(2), Vec::Ones(2));
  EXPECT_THROW(product_time_space(two, two), InvalidArgument);
  EXPECT_THROW(discrete_time_window(0.0, -1), InvalidArgument);
}
