#pragma once

#include "tsal/gp.hpp"

#include <random>

namespace tsal::testing {

inline double uniform(std::mt19937_64& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

inline Vec random_vec(std::mt19937_64& rng, Eigen::Index d, double a, double b) {
  Vec v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = uniform(rng, a, b);
  return v;
}

inline SeArdKernel random_kernel(std::mt19937_64& rng, Eigen::Index d, double noise_lo = 0.01, double noise_hi = 0.3) {
  return SeArdKernel(random_vec(rng, d, 0.5, 2.0), uniform(rng, 0.5, 2.0), uniform(rng, noise_lo, noise_hi));
}

inline GpModel random_model(std::mt19937_64& rng, Eigen::Index d, int n, const SeArdKernel& k, double lo = -1.5,
                            double hi = 1.5) {
  Mat x(n, d);
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    x.row(i) = random_vec(rng, d, lo, hi).transpose();
    y[i] = uniform(rng, -1.0, 1.0);
  }
  GpModel m(k, uniform(rng, -0.5, 0.5), x, y);
  m.fit();
  return m;
}

/// ||a - b|| / max(||b||, floor)
inline double rel_diff(const Vec& a, const Vec& b, double floor = 1e-10) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

}  // namespace tsal::testing
