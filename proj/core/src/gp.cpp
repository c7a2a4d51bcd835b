#include "tsal/gp.hpp"

#include "tsal/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

namespace tsal {

namespace {

// Smallest accepted squared pivot, relative to sf^2.  Anything below is
// treated as a failed factorization and triggers jitter escalation.
constexpr double kMinPivotRatio = 1e-12;
constexpr double kFirstJitter = 1e-10;
constexpr double kMaxJitter = 1e-4;

void check_dim(const SeArdKernel& kernel, Eigen::Index got, const char* what) {
  if (got != kernel.dim()) {
    std::ostringstream msg;
    msg << what << ": dimension " << got << " does not match kernel dimension " << kernel.dim();
    throw InvalidArgument(msg.str());
  }
}

}  // namespace

SeArdKernel::SeArdKernel(Vec lengthscales_, double signal_std_, double noise_std_)
    : lengthscales(std::move(lengthscales_)), signal_std(signal_std_), noise_std(noise_std_) {
  validate();
}

void SeArdKernel::validate() const {
  if (lengthscales.size() == 0) throw InvalidArgument("SeArdKernel: no lengthscales");
  for (Eigen::Index h = 0; h < lengthscales.size(); ++h) {
    if (!(lengthscales[h] > 0.0) || !std::isfinite(lengthscales[h]))
      throw InvalidArgument("SeArdKernel: lengthscales must be positive and finite");
  }
  if (!(signal_std > 0.0) || !std::isfinite(signal_std))
    throw InvalidArgument("SeArdKernel: signal std must be positive");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
    throw InvalidArgument("SeArdKernel: noise std must be non-negative");
}

double kernel_eval(const SeArdKernel& kernel, const VecRef& x1, const VecRef& x2) {
  check_dim(kernel, x1.size(), "kernel_eval");
  check_dim(kernel, x2.size(), "kernel_eval");
  const double r2 = ((x1 - x2).array() / kernel.lengthscales.array()).square().sum();
  return kernel.signal_variance() * std::exp(-0.5 * r2);
}

Mat kernel_matrix(const SeArdKernel& kernel, const MatRef& a, const MatRef& b) {
  check_dim(kernel, a.cols(), "kernel_matrix");
  check_dim(kernel, b.cols(), "kernel_matrix");
  const Eigen::ArrayXd inv_l = kernel.lengthscales.array().inverse();
  const Mat as = a * inv_l.matrix().asDiagonal();
  const Mat bs = b * inv_l.matrix().asDiagonal();
  Mat out(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out(i, j) = kernel.signal_variance() * std::exp(-0.5 * (as.row(i) - bs.row(j)).squaredNorm());
    }
  }
  return out;
}

Vec kernel_vector(const SeArdKernel& kernel, const MatRef& inputs, const VecRef& query) {
  check_dim(kernel, query.size(), "kernel_vector");
  if (inputs.rows() > 0) check_dim(kernel, inputs.cols(), "kernel_vector");
  const Eigen::ArrayXd inv_l2 = kernel.lengthscales.array().square().inverse();
  Vec out(inputs.rows());
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    const double r2 = ((inputs.row(i).transpose() - query).array().square() * inv_l2).sum();
    out[i] = kernel.signal_variance() * std::exp(-0.5 * r2);
  }
  return out;
}

GpModel::GpModel(SeArdKernel kernel, double mean_constant)
    : GpModel(std::move(kernel), mean_constant, Mat(), Vec()) {}

GpModel::GpModel(SeArdKernel kernel, double mean_constant, Mat inputs, Vec targets)
    : kernel_(std::move(kernel)), mean_(mean_constant), inputs_(std::move(inputs)),
      targets_(std::move(targets)) {
  kernel_.validate();
  if (inputs_.size() == 0) inputs_.resize(0, kernel_.dim());
  check_dim(kernel_, inputs_.cols(), "GpModel");
  if (inputs_.rows() != targets_.size())
    throw InvalidArgument("GpModel: number of inputs and targets differ");
}

void GpModel::set_hyperparameters(SeArdKernel kernel, double mean_constant) {
  kernel.validate();
  check_dim(kernel, inputs_.cols(), "GpModel::set_hyperparameters");
  kernel_ = std::move(kernel);
  mean_ = mean_constant;
  fitted_ = false;
}

void GpModel::add_point(const VecRef& x, double y) {
  check_dim(kernel_, x.size(), "GpModel::add_point");
  const Eigen::Index n = inputs_.rows();
  inputs_.conservativeResize(n + 1, Eigen::NoChange);
  inputs_.row(n) = x.transpose();
  targets_.conservativeResize(n + 1);
  targets_[n] = y;
  fitted_ = false;
}

void GpModel::fit() {
  const Eigen::Index n = inputs_.rows();
  const double sf2 = kernel_.signal_variance();
  if (n == 0) {
    chol_.resize(0, 0);
    alpha_.resize(0);
    jitter_ = 0.0;
    fitted_ = true;
    return;
  }
  Mat cov = kernel_matrix(kernel_, inputs_, inputs_);
  cov.diagonal().array() += kernel_.noise_variance();

  double jitter = 0.0;
  for (;;) {
    Mat shifted = cov;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Mat> llt(shifted);
    if (llt.info() == Eigen::Success) {
      Mat lower = llt.matrixL();
      const double min_pivot = lower.diagonal().array().square().minCoeff();
      if (std::isfinite(min_pivot) && min_pivot >= kMinPivotRatio * sf2) {
        chol_ = std::move(lower);
        jitter_ = jitter;
        fitted_ = true;
        alpha_ = solve(targets_.array() - mean_);
        return;
      }
    }
    if (jitter == 0.0) {
      jitter = kFirstJitter * sf2;
    } else if (jitter < kMaxJitter * sf2 * (1.0 - 1e-9)) {
      jitter *= 10.0;
    } else {
      std::ostringstream msg;
      msg << "GpModel::fit: Cholesky factorization failed with final jitter " << jitter;
      throw NumericalError(msg.str());
    }
  }
}

const Mat& GpModel::chol_factor() const {
  require_fitted();
  return chol_;
}

const Vec& GpModel::weights() const {
  require_fitted();
  return alpha_;
}

void GpModel::require_fitted() const {
  if (!fitted_) throw StateError("GpModel: model is not fitted");
}

void GpModel::check_query(const VecRef& query) const { check_dim(kernel_, query.size(), "GpModel"); }

Vec GpModel::half_solve(const VecRef& b) const {
  if (!fitted_) throw StateError("GpModel: model is not fitted");
  if (b.size() == 0) return Vec(0);
  return chol_.triangularView<Eigen::Lower>().solve(b);
}

Vec GpModel::solve(const VecRef& b) const {
  if (!fitted_) throw StateError("GpModel: model is not fitted");
  if (b.size() == 0) return Vec(0);
  Vec v = chol_.triangularView<Eigen::Lower>().solve(b);
  chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(v);
  return v;
}

Posterior GpModel::posterior(const VecRef& query) const {
  require_fitted();
  check_query(query);
  Posterior out;
  if (size() == 0) {
    out.mean = mean_;
    out.variance = kernel_.signal_variance();
    return out;
  }
  const Vec kq = kernel_vector(kernel_, inputs_, query);
  const Vec v = half_solve(kq);
  out.mean = mean_ + kq.dot(alpha_);
  out.variance = kernel_.signal_variance() - v.squaredNorm();
  return out;
}

PosteriorGradient GpModel::posterior_with_gradient(const VecRef& query) const {
  require_fitted();
  check_query(query);
  const Eigen::Index d = dim();
  PosteriorGradient out;
  out.d_mean = Vec::Zero(d);
  out.d_variance = Vec::Zero(d);
  if (size() == 0) {
    out.mean = mean_;
    out.variance = kernel_.signal_variance();
    return out;
  }
  const Vec kq = kernel_vector(kernel_, inputs_, query);
  const Vec w = solve(kq);
  out.mean = mean_ + kq.dot(alpha_);
  out.variance = kernel_.signal_variance() - kq.dot(w);
  // d k(x_i, q) / d q_h = k(x_i, q) (x_ih - q_h) / l_h^2
  for (Eigen::Index h = 0; h < d; ++h) {
    const double inv_l2 = 1.0 / (kernel_.lengthscales[h] * kernel_.lengthscales[h]);
    const Vec dk = kq.array() * (inputs_.col(h).array() - query[h]) * inv_l2;
    out.d_mean[h] = dk.dot(alpha_);
    out.d_variance[h] = -2.0 * dk.dot(w);
  }
  return out;
}

GpModel fit_cholesky(GpModel model) {
  model.fit();
  return model;
}

}  // namespace tsal
