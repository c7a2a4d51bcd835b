#include "helpers.hpp"
#include "tsal/errors.hpp"
#include "tsal/gp.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace tsal;
using namespace tsal::testing;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }
Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST(KernelEval, ZeroLagGivesSignalVariance) {
  const SeArdKernel k(v2(0.7, 1.3), 1.0, 0.0);
  EXPECT_DOUBLE_EQ(kernel_eval(k, v2(0.3, -2.0), v2(0.3, -2.0)), 1.0);
}

TEST(KernelEval, OneDimensional) {
  const SeArdKernel k(v1(1.0), 1.0, 0.0);
  EXPECT_NEAR(kernel_eval(k, v1(0.0), v1(1.0)), std::exp(-0.5), 1e-15);
}

TEST(KernelEval, ArdTwoDimensional) {
  const SeArdKernel k(v2(1.0, 2.0), 2.0, 0.0);
  EXPECT_NEAR(kernel_eval(k, v2(0, 0), v2(1, 2)), 4.0 * std::exp(-1.0), 1e-14);
}

TEST(KernelEval, DimensionMismatchThrows) {
  const SeArdKernel k(v2(1.0, 2.0), 1.0, 0.0);
  EXPECT_THROW(kernel_eval(k, v1(0.0), v2(0, 0)), InvalidArgument);
}

TEST(KernelEval, RejectsBadHyperparameters) {
  EXPECT_THROW(SeArdKernel(v1(0.0), 1.0, 0.0), InvalidArgument);
  EXPECT_THROW(SeArdKernel(v1(1.0), -1.0, 0.0), InvalidArgument);
  EXPECT_THROW(SeArdKernel(v1(1.0), 1.0, -0.1), InvalidArgument);
}

TEST(KernelMatrix, SymmetricAndFactorizable) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index d = 1 + rep % 3;
    const SeArdKernel k = random_kernel(rng, d, 0.0, 0.0);
    Mat x(15, d);
    for (int i = 0; i < 15; ++i) x.row(i) = random_vec(rng, d, -2, 2).transpose();
    const Mat km = kernel_matrix(k, x, x);
    EXPECT_LT((km - km.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    GpModel m(k, 0.0, x, Vec::Zero(15));
    EXPECT_NO_THROW(m.fit());
  }
}

TEST(FitCholesky, EmptyModel) {
  GpModel m = fit_cholesky(GpModel(SeArdKernel(v1(1.0), 1.0, 0.0), 0.0));
  EXPECT_EQ(m.chol_factor().rows(), 0);
}

TEST(FitCholesky, SinglePoint) {
  Mat x(1, 1);
  x << 0.3;
  GpModel m = fit_cholesky(GpModel(SeArdKernel(v1(1.0), 1.0, 0.0), 0.0, x, Vec::Zero(1)));
  EXPECT_DOUBLE_EQ(m.chol_factor()(0, 0), 1.0);
  EXPECT_EQ(m.jitter(), 0.0);
}

TEST(FitCholesky, DuplicateInputNeedsJitter) {
  Mat x(2, 1);
  x << 0.5, 0.5;
  GpModel m = fit_cholesky(GpModel(SeArdKernel(v1(1.0), 1.0, 0.0), 0.0, x, Vec::Zero(2)));
  EXPECT_GT(m.jitter(), 0.0);
  const Mat km = kernel_matrix(m.kernel(), x, x);
  const Mat rec = m.chol_factor() * m.chol_factor().transpose();
  EXPECT_LE((rec - km).cwiseAbs().maxCoeff(), 10.0 * m.jitter());
}

TEST(FitCholesky, ReconstructsNoisyCovariance) {
  std::mt19937_64 rng(2);
  const SeArdKernel k = random_kernel(rng, 2);
  GpModel m = random_model(rng, 2, 20, k);
  Mat km = kernel_matrix(k, m.inputs(), m.inputs());
  km.diagonal().array() += m.diagonal_shift();
  const Mat rec = m.chol_factor() * m.chol_factor().transpose();
  EXPECT_LT((rec - km).norm() / km.norm(), 1e-8);
}

TEST(FitCholesky, Deterministic) {
  std::mt19937_64 rng(3);
  const SeArdKernel k = random_kernel(rng, 2);
  GpModel a = random_model(rng, 2, 10, k);
  GpModel b = fit_cholesky(GpModel(k, a.mean_constant(), a.inputs(), a.targets()));
  EXPECT_EQ(a.chol_factor(), b.chol_factor());
}

TEST(Posterior, PriorWithoutData) {
  GpModel m = fit_cholesky(GpModel(SeArdKernel(v1(1.0), 1.5, 0.1), 0.7));
  const Posterior p = m.posterior(v1(3.0));
  EXPECT_DOUBLE_EQ(p.mean, 0.7);
  EXPECT_DOUBLE_EQ(p.variance, 2.25);
}

TEST(Posterior, InterpolatesNoiseFree) {
  std::mt19937_64 rng(4);
  const SeArdKernel k = random_kernel(rng, 2, 0.0, 0.0);
  GpModel m = random_model(rng, 2, 8, k);
  for (int i = 0; i < 8; ++i) {
    const Posterior p = m.posterior(m.inputs().row(i).transpose());
    EXPECT_LT(p.variance, 1e-8);
    EXPECT_NEAR(p.mean, m.targets()[i], 1e-6);
  }
}

TEST(Posterior, RankOneFormula) {
  Mat x(1, 1);
  x << 1.0;
  GpModel m = fit_cholesky(GpModel(SeArdKernel(v1(1.0), 1.0, 0.0), 0.0, x, Vec::Zero(1)));
  EXPECT_NEAR(m.posterior(v1(0.0)).variance, 1.0 - std::exp(-1.0), 1e-15);
}

TEST(Posterior, UnfittedThrows) {
  GpModel m(SeArdKernel(v1(1.0), 1.0, 0.0), 0.0);
  EXPECT_THROW((void)m.posterior(v1(0.0)), StateError);
  m.fit();
  m.add_point(v1(0.0), 1.0);
  EXPECT_THROW((void)m.posterior(v1(0.0)), StateError);
}

TEST(Posterior, VarianceWithinBounds) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const SeArdKernel k = random_kernel(rng, 2, 0.0, 0.1);
    GpModel m = random_model(rng, 2, 12, k);
    const double v = m.posterior(random_vec(rng, 2, -3, 3)).variance;
    EXPECT_GE(v, -1e-9);
    EXPECT_LE(v, k.signal_variance() + 1e-9);
  }
}

TEST(Posterior, AddingDataNeverIncreasesVariance) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 200; ++rep) {
    const SeArdKernel k = random_kernel(rng, 2);
    GpModel m = random_model(rng, 2, 6, k);
    const Vec q = random_vec(rng, 2, -2, 2);
    const double before = m.posterior(q).variance;
    m.add_point(random_vec(rng, 2, -2, 2), 0.3);
    m.fit();
    EXPECT_LE(m.posterior(q).variance, before + 1e-9);
  }
}

TEST(Posterior, PermutationInvariant) {
  std::mt19937_64 rng(7);
  const SeArdKernel k = random_kernel(rng, 3);
  GpModel m = random_model(rng, 3, 10, k);
  std::vector<int> perm(10);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Mat x(10, 3);
  Vec y(10);
  for (int i = 0; i < 10; ++i) {
    x.row(i) = m.inputs().row(perm[static_cast<std::size_t>(i)]);
    y[i] = m.targets()[perm[static_cast<std::size_t>(i)]];
  }
  GpModel p = fit_cholesky(GpModel(k, m.mean_constant(), x, y));
  for (int rep = 0; rep < 10; ++rep) {
    const Vec q = random_vec(rng, 3, -2, 2);
    EXPECT_NEAR(m.posterior(q).mean, p.posterior(q).mean, 1e-10);
    EXPECT_NEAR(m.posterior(q).variance, p.posterior(q).variance, 1e-10);
  }
}

TEST(Posterior, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  const SeArdKernel k = random_kernel(rng, 2);
  GpModel m = random_model(rng, 2, 8, k);
  const Vec q = random_vec(rng, 2, -1, 1);
  const PosteriorGradient g = m.posterior_with_gradient(q);
  Vec fd_mean(2);
  Vec fd_var(2);
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    Vec a = q;
    Vec b = q;
    a[i] += h;
    b[i] -= h;
    fd_mean[i] = (m.posterior(a).mean - m.posterior(b).mean) / (2 * h);
    fd_var[i] = (m.posterior(a).variance - m.posterior(b).variance) / (2 * h);
  }
  EXPECT_LT(rel_diff(g.d_mean, fd_mean), 1e-6);
  EXPECT_LT(rel_diff(g.d_variance, fd_var), 1e-6);
}
