#pragma once

#include <cstdint>
#include <string>

namespace tsal {

struct ValidationReport {
  int samples = 0;
  double max_rel_err_marginal = 0.0;
  double max_rel_err_evaluate = 0.0;
  std::string worst;  // description of the worst configuration
  double seconds = 0.0;

  [[nodiscard]] double max_rel_err() const;
  [[nodiscard]] bool passed(double tolerance = 1e-6) const { return max_rel_err() < tolerance; }
};

/// Random closed-form vs quadrature comparison.  Each sample draws a kernel,
/// a measure (box, Gaussian, signed sum, or a product with a point mass) in
/// d in [1, max_dim], checks cross_marginal at two points and evaluate() of
/// a random small model at one candidate.
ValidationReport run_validation_sweep(int samples, std::uint64_t seed, int max_dim = 4);

}  // namespace tsal
