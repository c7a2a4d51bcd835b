#pragma once

#include "tsal/gp.hpp"
#include "tsal/measures.hpp"

#include <string_view>

namespace tsal {

/// erf(u) - erf(v) without cancellation: tails go through erfc and nearly
/// equal arguments through a Taylor expansion about the midpoint.
double erf_difference(double u, double v);

/// A (kernel, measure) pair whose product-kernel integral
///   integral k(x1, r) k(r, x2) dmu(r)
/// has a closed form.  Only the ARD squared-exponential kernel is shipped.
class MarginalKernel {
 public:
  MarginalKernel(SeArdKernel kernel, FiniteMeasure measure);

  [[nodiscard]] const SeArdKernel& kernel() const { return kernel_; }
  [[nodiscard]] const FiniteMeasure& measure() const { return measure_; }
  [[nodiscard]] Eigen::Index dim() const { return kernel_.dim(); }

 private:
  SeArdKernel kernel_;
  FiniteMeasure measure_;
};

double cross_marginal(const MarginalKernel& mk, const VecRef& x1, const VecRef& x2);
/// Gradient of cross_marginal with respect to x1.
Vec cross_marginal_gradient(const MarginalKernel& mk, const VecRef& x1, const VecRef& x2);

/// integral k(r, x1)^2 dmu(r); identical to cross_marginal(mk, x1, x1).
double single_marginal(const MarginalKernel& mk, const VecRef& x1);
/// d/dx of single_marginal(mk, x).
Vec single_marginal_gradient(const MarginalKernel& mk, const VecRef& x);

/// M_ij = cross_marginal(x_i, x_j) over the rows of `inputs`.
Mat data_marginal_matrix(const MarginalKernel& mk, const MatRef& inputs);

/// m_i = cross_marginal(query, x_i) and, if `jacobian` is given, the n x d
/// matrix of derivatives with respect to `query`.
Vec cross_marginal_column(const MarginalKernel& mk, const MatRef& inputs, const VecRef& query,
                          Mat* jacobian = nullptr);

/// Throws UnsupportedError unless `kernel_family` paired with `measure_kind`
/// has a shipped closed form.  Names: "se_ard" is supported; "matern12",
/// "matern32", "matern52", "polynomial", "wiener", "cosine", "rff" have known
/// closed forms that are not implemented; "rational_quadratic" and
/// "periodic" have none.  Measure kinds: "uniform_box", "diag_gaussian",
/// "dirac", "weighted_sum", "product".
void require_marginalizable(std::string_view kernel_family, std::string_view measure_kind);

}  // namespace tsal
