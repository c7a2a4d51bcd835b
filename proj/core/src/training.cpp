#include "tsal/errors.hpp"
#include "tsal/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace tsal {

double softplus(double x) {
  // log(1 + e^x) without overflow for large x.
  return x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double softplus_inverse(double y) {
  if (!(y > 0.0)) throw InvalidArgument("softplus_inverse: argument must be positive");
  return y > 30.0 ? y + std::log(-std::expm1(-y)) : std::log(std::expm1(y));
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double prior_term(double value, const GaussianPrior& prior, double* grad) {
  const double z = (value - prior.mean) / prior.std;
  if (grad) *grad = z / prior.std;
  return 0.5 * z * z + std::log(prior.std) + 0.5 * std::log(2.0 * std::numbers::pi);
}

double objective(const GpModel& base, const HyperPriors& priors, const VecRef& theta, Vec* grad) {
  try {
    GpModel model = from_unconstrained(base, theta);
    model.fit();
    const double f = negative_log_posterior(model, priors, grad);
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  } catch (const NumericalError&) {
    return std::numeric_limits<double>::infinity();
  } catch (const InvalidArgument&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

HyperPriors HyperPriors::shared(Eigen::Index dim, GaussianPrior lengthscale, GaussianPrior signal,
                                GaussianPrior noise, GaussianPrior mean) {
  HyperPriors p;
  p.lengthscales.assign(static_cast<std::size_t>(dim), lengthscale);
  p.signal_std = signal;
  p.noise_std = noise;
  p.mean_constant = mean;
  return p;
}

void HyperPriors::validate(Eigen::Index dim) const {
  if (static_cast<Eigen::Index>(lengthscales.size()) != dim)
    throw InvalidArgument("HyperPriors: one lengthscale prior per input dimension required");
  auto check = [](const GaussianPrior& p) {
    if (!(p.std > 0.0)) throw InvalidArgument("HyperPriors: prior std must be positive");
  };
  for (const auto& p : lengthscales) check(p);
  check(signal_std);
  check(noise_std);
  check(mean_constant);
}

Vec to_unconstrained(const GpModel& model) {
  const Eigen::Index d = model.dim();
  Vec theta(d + 3);
  for (Eigen::Index h = 0; h < d; ++h) theta[h] = softplus_inverse(model.kernel().lengthscales[h]);
  theta[d] = softplus_inverse(model.kernel().signal_std);
  // A zero noise std has no finite preimage; clamp to a tiny positive value.
  theta[d + 1] = softplus_inverse(std::max(model.kernel().noise_std, 1e-12));
  theta[d + 2] = model.mean_constant();
  return theta;
}

GpModel from_unconstrained(const GpModel& model, const VecRef& theta) {
  const Eigen::Index d = model.dim();
  if (theta.size() != d + 3) throw InvalidArgument("from_unconstrained: wrong parameter count");
  Vec l(d);
  for (Eigen::Index h = 0; h < d; ++h) l[h] = softplus(theta[h]);
  GpModel out = model;
  out.set_hyperparameters(SeArdKernel(l, softplus(theta[d]), softplus(theta[d + 1])), theta[d + 2]);
  return out;
}

double negative_log_posterior(const GpModel& model_in, const HyperPriors& priors, Vec* gradient) {
  const Eigen::Index d = model_in.dim();
  priors.validate(d);
  GpModel fitted_copy;
  const GpModel* model = &model_in;
  if (!model_in.fitted()) {
    fitted_copy = fit_cholesky(model_in);
    model = &fitted_copy;
  }
  const SeArdKernel& k = model->kernel();
  const Eigen::Index n = model->size();
  const Vec theta = to_unconstrained(*model);

  double nll = 0.0;
  Vec g = Vec::Zero(d + 3);
  if (n > 0) {
    const Mat& chol = model->chol_factor();
    const Vec& alpha = model->weights();
    const Vec resid = model->targets().array() - model->mean_constant();
    nll = 0.5 * resid.dot(alpha) + chol.diagonal().array().log().sum() +
          0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    if (gradient) {
      Mat kinv = Mat::Identity(n, n);
      chol.triangularView<Eigen::Lower>().solveInPlace(kinv);
      chol.triangularView<Eigen::Lower>().transpose().solveInPlace(kinv);
      const Mat w = kinv - alpha * alpha.transpose();
      const Mat kxx = kernel_matrix(k, model->inputs(), model->inputs());
      const Mat& x = model->inputs();
      for (Eigen::Index h = 0; h < d; ++h) {
        const double l = k.lengthscales[h];
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
          for (Eigen::Index i = 0; i < n; ++i) {
            const double diff = x(i, h) - x(j, h);
            acc += w(i, j) * kxx(i, j) * diff * diff;
          }
        }
        g[h] = 0.5 * acc / (l * l * l) * sigmoid(theta[h]);
      }
      g[d] = 0.5 * (w.array() * kxx.array()).sum() * 2.0 / k.signal_std * sigmoid(theta[d]);
      g[d + 1] = k.noise_std * w.trace() * sigmoid(theta[d + 1]);
      g[d + 2] = -alpha.sum();
    }
  }

  double prior = 0.0;
  double pg = 0.0;
  for (Eigen::Index h = 0; h < d; ++h) {
    prior += prior_term(theta[h], priors.lengthscales[static_cast<std::size_t>(h)], &pg);
    g[h] += pg;
  }
  prior += prior_term(theta[d], priors.signal_std, &pg);
  g[d] += pg;
  prior += prior_term(theta[d + 1], priors.noise_std, &pg);
  g[d + 1] += pg;
  prior += prior_term(theta[d + 2], priors.mean_constant, &pg);
  g[d + 2] += pg;

  if (gradient) *gradient = g;
  return nll + prior;
}

GpModel train_map(GpModel model, const HyperPriors& priors, int steps, bool initial,
                  double learning_rate) {
  priors.validate(model.dim());
  if (model.size() == 0) throw InvalidArgument("train_map: at least one training point required");
  if (steps < 0) throw InvalidArgument("train_map: negative step count");
  if (!model.fitted()) model.fit();
  if (steps == 0) return model;

  Vec theta = to_unconstrained(model);
  Vec grad;
  double f = objective(model, priors, theta, &grad);
  if (!std::isfinite(f)) throw NumericalError("train_map: objective is not finite at the start");

  Vec best_theta = theta;
  double best_f = f;

  if (initial) {
    double step = 0.1;
    bool converged = false;
    for (int it = 0; it < steps && !converged; ++it) {
      const double gnorm2 = grad.squaredNorm();
      if (gnorm2 < 1e-16) break;
      bool accepted = false;
      while (step > 1e-14) {
        const Vec trial = theta - step * grad;
        Vec trial_grad;
        const double ft = objective(model, priors, trial, &trial_grad);
        if (ft <= f - 1e-4 * step * gnorm2) {
          theta = trial;
          grad = trial_grad;
          const double improvement = f - ft;
          f = ft;
          accepted = true;
          step *= 2.0;
          converged = improvement < 1e-12 * (1.0 + std::abs(f));
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    best_theta = theta;
    best_f = f;
  } else {
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    Vec m1 = Vec::Zero(theta.size());
    Vec m2 = Vec::Zero(theta.size());
    for (int it = 1; it <= steps; ++it) {
      m1 = beta1 * m1 + (1.0 - beta1) * grad;
      m2 = beta2 * m2 + (1.0 - beta2) * grad.cwiseAbs2();
      const Vec mhat = m1 / (1.0 - std::pow(beta1, it));
      const Vec vhat = m2 / (1.0 - std::pow(beta2, it));
      theta -= (learning_rate * mhat.array() / (vhat.array().sqrt() + eps)).matrix();
      Vec g_new;
      const double f_new = objective(model, priors, theta, &g_new);
      if (!std::isfinite(f_new)) {
        // Step into a region where the covariance cannot be factorized: stop.
        break;
      }
      grad = g_new;
      if (f_new < best_f) {
        best_f = f_new;
        best_theta = theta;
      }
    }
  }

  GpModel out = from_unconstrained(model, best_theta);
  out.fit();
  return out;
}

}  // namespace tsal
