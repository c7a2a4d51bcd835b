#include "helpers.hpp"
#include "tsal/acquisition.hpp"
#include "tsal/errors.hpp"
#include "tsal/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace tsal;
using namespace tsal::testing;

namespace {

Vec c1(double a) { return Vec::Constant(1, a); }

}  // namespace

TEST(Rules, WeightSums) {
  const Rule1D gl = gauss_legendre(17);
  EXPECT_NEAR(std::accumulate(gl.weights.begin(), gl.weights.end(), 0.0), 2.0, 1e-14);
  const Rule1D gh = gauss_hermite(17);
  EXPECT_NEAR(std::accumulate(gh.weights.begin(), gh.weights.end(), 0.0), 1.0, 1e-14);
  EXPECT_THROW(gauss_legendre(1), InvalidArgument);
}

TEST(Integrate, LegendrePolynomialExactness) {
  const auto mu = FiniteMeasure::uniform_box(c1(0.0), c1(2.0), 3.0);
  const double got = integrate(quad::GaussLegendre{3}, mu, [](const Vec& x) { return std::pow(x[0], 5); });
  EXPECT_NEAR(got, 3.0 * 64.0 / 6.0, 1e-12);
}

TEST(Integrate, ConstantGivesMass) {
  const auto mu = FiniteMeasure::weighted_sum(
      {{2.0, FiniteMeasure::uniform_box(Vec::Zero(2), Vec::Ones(2))},
       {-0.5, FiniteMeasure::uniform_box(Vec::Zero(2), Vec::Constant(2, 0.5), 4.0)}});
  const auto one = [](const Vec&) { return 1.0; };
  EXPECT_NEAR(integrate(quad::GaussLegendre{4}, mu, one), mu.mass(), 1e-14);
  EXPECT_NEAR(integrate(quad::AdaptiveSimpson{}, mu, one), mu.mass(), 1e-12);
}

TEST(Integrate, HermiteSecondMoment) {
  const auto mu = FiniteMeasure::diag_gaussian(c1(1.0), c1(2.0));
  EXPECT_NEAR(integrate(quad::GaussHermite{40}, mu, [](const Vec& x) { return x[0] * x[0]; }), 5.0, 1e-12);
}

TEST(Integrate, DiracFixesCoordinates) {
  const auto mu = FiniteMeasure::product(FiniteMeasure::dirac(c1(0.7), 2.0), FiniteMeasure::uniform_box(c1(0), c1(1)));
  const double got = integrate(quad::GaussLegendre{8}, mu, [](const Vec& x) { return x[0] * x[1]; });
  EXPECT_NEAR(got, 2.0 * 0.7 * 0.5, 1e-14);
}

TEST(Integrate, AdaptiveSimpsonSmooth) {
  const auto mu = FiniteMeasure::uniform_box(c1(0.0), c1(M_PI));
  EXPECT_NEAR(integrate(quad::AdaptiveSimpson{1e-12}, mu, [](const Vec& x) { return std::sin(x[0]); }), 2.0, 1e-10);
}

TEST(Integrate, Errors) {
  const auto gauss = FiniteMeasure::diag_gaussian(c1(0.0), c1(1.0));
  const auto box = FiniteMeasure::uniform_box(Vec::Zero(3), Vec::Ones(3));
  const auto one = [](const Vec&) { return 1.0; };
  EXPECT_THROW(integrate(quad::GaussLegendre{8}, gauss, one), InvalidArgument);
  EXPECT_THROW(integrate(quad::GaussHermite{8}, box, one), InvalidArgument);
  EXPECT_THROW(integrate(quad::AdaptiveSimpson{}, gauss, one), InvalidArgument);
  EXPECT_THROW(integrate(quad::GaussLegendre{1000}, box, one), ResourceError);
}

TEST(BruteForce, EmptyModelTwoWays) {
  GpModel empty(SeArdKernel(Vec::Constant(2, 0.8), 1.3, 0.2), 0.0);
  empty.fit();
  const auto mu = FiniteMeasure::uniform_box(Vec::Constant(2, -1), Vec::Constant(2, 1));
  const Vec x = Vec::Constant(2, 0.25);
  GpModel one = empty;
  one.add_point(x, 0.0);
  one.fit();
  const quad::GaussLegendre rule{40};
  EXPECT_NEAR(imspe_bruteforce(empty, mu, x, rule), integrated_variance_bruteforce(one, mu, rule), 1e-12);
  EXPECT_NEAR(integrated_variance_bruteforce(empty, mu, rule), 1.69 * 4.0, 1e-12);
}

TEST(BruteForce, MotivatingValue) {
  Mat x(1, 1);
  x << 1.0;
  GpModel m(SeArdKernel(c1(1.0), 1.0, 0.0), 0.0, x, Vec::Zero(1));
  m.fit();
  const auto mu = FiniteMeasure::diag_gaussian(c1(0.0), c1(1.0));
  EXPECT_NEAR(imspe_bruteforce(m, mu, c1(0.0), quad::GaussHermite{80}), 0.226082711505197, 1e-12);
}

TEST(BruteForce, CandidateReducesVariance) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const GpModel m = random_model(rng, 2, rep % 6, random_kernel(rng, 2));
    const auto mu = FiniteMeasure::uniform_box(Vec::Constant(2, -1), Vec::Constant(2, 1));
    const quad::GaussLegendre rule{24};
    EXPECT_LE(imspe_bruteforce(m, mu, random_vec(rng, 2, -2, 2), rule),
              integrated_variance_bruteforce(m, mu, rule) + 1e-12);
  }
}

TEST(BruteForce, ConvergesInNodes) {
  std::mt19937_64 rng(22);
  const GpModel m = random_model(rng, 2, 5, random_kernel(rng, 2));
  const auto mu = FiniteMeasure::uniform_box(Vec::Constant(2, -2), Vec::Constant(2, 2));
  const Vec x = random_vec(rng, 2, -1, 1);
  const double exact = AcquisitionWorkspace::build(m, acq::Imspe{mu}).evaluate(x);
  const double e8 = std::abs(imspe_bruteforce(m, mu, x, quad::GaussLegendre{8}) - exact);
  const double e32 = std::abs(imspe_bruteforce(m, mu, x, quad::GaussLegendre{32}) - exact);
  EXPECT_LT(e32, e8 + 1e-15);
  EXPECT_LT(e32, 1e-9 * std::abs(exact));
}

TEST(BruteForce, Errors) {
  GpModel m(SeArdKernel(c1(1.0), 1.0, 0.1), 0.0);
  const auto mu = FiniteMeasure::uniform_box(c1(0), c1(1));
  EXPECT_THROW(imspe_bruteforce(m, mu, c1(0.0), quad::GaussLegendre{8}), StateError);
  m.fit();
  EXPECT_THROW(imspe_bruteforce(m, mu, Vec::Zero(2), quad::GaussLegendre{8}), InvalidArgument);
}
