#pragma once

#include <Eigen/Core>

#include <vector>

namespace tsal {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using VecRef = Eigen::Ref<const Eigen::VectorXd>;
using MatRef = Eigen::Ref<const Eigen::MatrixXd>;

/// ARD squared-exponential covariance
///   k(x, y) = sf^2 * exp(-0.5 * sum_h (x_h - y_h)^2 / l_h^2)
/// plus an i.i.d. observation noise with standard deviation `noise_std`.
struct SeArdKernel {
  Vec lengthscales;
  double signal_std = 1.0;
  double noise_std = 0.0;

  SeArdKernel() = default;
  SeArdKernel(Vec lengthscales, double signal_std, double noise_std);

  [[nodiscard]] Eigen::Index dim() const { return lengthscales.size(); }
  [[nodiscard]] double signal_variance() const { return signal_std * signal_std; }
  [[nodiscard]] double noise_variance() const { return noise_std * noise_std; }

  /// Throws InvalidArgument unless lengthscales > 0, signal_std > 0, noise_std >= 0.
  void validate() const;
};

double kernel_eval(const SeArdKernel& kernel, const VecRef& x1, const VecRef& x2);

/// Cross-covariance between the rows of `a` and the rows of `b`.
Mat kernel_matrix(const SeArdKernel& kernel, const MatRef& a, const MatRef& b);

/// k(x_i, query) for every row x_i of `inputs`.
Vec kernel_vector(const SeArdKernel& kernel, const MatRef& inputs, const VecRef& query);

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

struct PosteriorGradient {
  double mean = 0.0;
  double variance = 0.0;
  Vec d_mean;
  Vec d_variance;
};

/// Constant-mean GP regression model with a cached Cholesky factor of
/// k(x, x) + (noise^2 + jitter) I.  Inputs are stored row-wise (n x d).
///
/// Mutation (adding data, changing hyperparameters) drops the factor;
/// queries require fit() first.  A fitted model is safe to share read-only.
class GpModel {
 public:
  GpModel() = default;
  GpModel(SeArdKernel kernel, double mean_constant);
  GpModel(SeArdKernel kernel, double mean_constant, Mat inputs, Vec targets);

  [[nodiscard]] const SeArdKernel& kernel() const { return kernel_; }
  [[nodiscard]] double mean_constant() const { return mean_; }
  [[nodiscard]] const Mat& inputs() const { return inputs_; }
  [[nodiscard]] const Vec& targets() const { return targets_; }
  [[nodiscard]] Eigen::Index size() const { return inputs_.rows(); }
  [[nodiscard]] Eigen::Index dim() const { return kernel_.dim(); }

  void set_hyperparameters(SeArdKernel kernel, double mean_constant);
  void add_point(const VecRef& x, double y);

  /// Factorizes the noisy training covariance.  Tries without jitter first,
  /// then escalates jitter from 1e-10 * sf^2 by x10 up to 1e-4 * sf^2.
  void fit();

  [[nodiscard]] bool fitted() const { return fitted_; }
  [[nodiscard]] double jitter() const { return jitter_; }
  /// Lower-triangular C with C C^T = k(x, x) + (noise^2 + jitter) I.
  [[nodiscard]] const Mat& chol_factor() const;
  /// (K + noise^2 I)^{-1} (y - m).
  [[nodiscard]] const Vec& weights() const;
  /// Diagonal added to k(x, x) in the factorization (noise^2 + jitter).
  [[nodiscard]] double diagonal_shift() const { return kernel_.noise_variance() + jitter_; }

  /// Latent (noise-free) posterior mean and variance.
  [[nodiscard]] Posterior posterior(const VecRef& query) const;
  [[nodiscard]] PosteriorGradient posterior_with_gradient(const VecRef& query) const;

  /// (K + noise^2 I)^{-1} b using the cached factor.
  [[nodiscard]] Vec solve(const VecRef& b) const;
  /// C^{-1} b.
  [[nodiscard]] Vec half_solve(const VecRef& b) const;

 private:
  void require_fitted() const;
  void check_query(const VecRef& query) const;

  SeArdKernel kernel_;
  double mean_ = 0.0;
  Mat inputs_;
  Vec targets_;

  bool fitted_ = false;
  double jitter_ = 0.0;
  Mat chol_;
  Vec alpha_;
};

/// Returns a fitted copy of `model`.
GpModel fit_cholesky(GpModel model);

// --- MAP hyperparameter training -------------------------------------------

double softplus(double x);
double softplus_inverse(double y);

struct GaussianPrior {
  double mean = 0.0;
  double std = 1.0;
};

/// Gaussian priors on the softplus-inverse of each lengthscale, signal std
/// and noise std, and directly on the constant mean.
struct HyperPriors {
  std::vector<GaussianPrior> lengthscales;
  GaussianPrior signal_std;
  GaussianPrior noise_std;
  GaussianPrior mean_constant;

  /// Same prior for every lengthscale.
  static HyperPriors shared(Eigen::Index dim, GaussianPrior lengthscale, GaussianPrior signal,
                            GaussianPrior noise, GaussianPrior mean);
  void validate(Eigen::Index dim) const;
};

/// Unconstrained training coordinates:
///   [softplus^-1(l_1..l_d), softplus^-1(sf), softplus^-1(sn), m].
Vec to_unconstrained(const GpModel& model);
/// Model with hyperparameters taken from unconstrained coordinates (unfitted).
GpModel from_unconstrained(const GpModel& model, const VecRef& theta);

/// Negative log posterior (negative log marginal likelihood plus negative log
/// prior) of the fitted `model`, optionally with its gradient with respect to
/// the unconstrained coordinates.
double negative_log_posterior(const GpModel& model, const HyperPriors& priors,
                              Vec* gradient = nullptr);

/// MAP training in unconstrained coordinates.  `initial` selects gradient
/// descent with backtracking line search (a full optimization capped at
/// `steps` iterations); otherwise exactly `steps` Adam updates are applied
/// and the best iterate is kept.  Returns a fitted model.
GpModel train_map(GpModel model, const HyperPriors& priors, int steps, bool initial,
                  double learning_rate = 0.05);

}  // namespace tsal
