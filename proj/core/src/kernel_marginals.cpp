#include "tsal/kernel_marginals.hpp"

#include "tsal/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace tsal {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kTwoOverSqrtPi = std::numbers::inv_sqrtpi * 2.0;

struct FactorValue {
  double value;
  double d_first;  // derivative with respect to the first argument
};

// One-dimensional factor of
//   integral exp(-(r-a)^2/(2l^2)) exp(-(r-b)^2/(2l^2)) dnu(r).
FactorValue eval_factor(const Factor1D& f, double a, double b, double l) {
  const double l2 = l * l;
  const double diff = a - b;
  const double c = 0.5 * (a + b);
  if (const auto* iv = std::get_if<factor::Interval>(&f)) {
    const double e = std::exp(-diff * diff / (4.0 * l2));
    const double uh = (iv->upper - c) / l;
    const double ul = (iv->lower - c) / l;
    const double v = e * 0.5 * kSqrtPi * l * erf_difference(uh, ul);
    const double dv = -diff / (2.0 * l2) * v - 0.5 * e * (std::exp(-uh * uh) - std::exp(-ul * ul));
    return {v, dv};
  }
  if (const auto* nm = std::get_if<factor::Normal>(&f)) {
    const double q = l2 + 2.0 * nm->std * nm->std;
    const double off = c - nm->mean;
    const double v = l / std::sqrt(q) * std::exp(-diff * diff / (4.0 * l2) - off * off / q);
    return {v, v * (-diff / (2.0 * l2) - off / q)};
  }
  const double t = std::get<factor::Atom>(f).at;
  const double ra = t - a;
  const double rb = t - b;
  const double v = std::exp(-(ra * ra + rb * rb) / (2.0 * l2));
  return {v, v * ra / l2};
}

void check_point(const MarginalKernel& mk, Eigen::Index size) {
  if (size != mk.dim()) throw InvalidArgument("kernel marginal: point dimension mismatch");
}

double marginal_value(const MarginalKernel& mk, const VecRef& x1, const VecRef& x2) {
  const auto& l = mk.kernel().lengthscales;
  double total = 0.0;
  for (const auto& term : mk.measure().terms()) {
    double prod = term.weight;
    for (std::size_t h = 0; h < term.factors.size() && prod != 0.0; ++h) {
      const auto hh = static_cast<Eigen::Index>(h);
      prod *= eval_factor(term.factors[h], x1[hh], x2[hh], l[hh]).value;
    }
    total += prod;
  }
  const double sf2 = mk.kernel().signal_variance();
  return sf2 * sf2 * total;
}

// Value and gradient with respect to x1 (and, when `both` is set, the
// derivative of the diagonal x1 = x2 = x along x).
double marginal_with_gradient(const MarginalKernel& mk, const VecRef& x1, const VecRef& x2,
                              bool both, Eigen::Ref<Vec> grad) {
  const auto& l = mk.kernel().lengthscales;
  const Eigen::Index d = mk.dim();
  grad.setZero();
  double total = 0.0;
  std::vector<FactorValue> fv(static_cast<std::size_t>(d));
  std::vector<double> prefix(static_cast<std::size_t>(d) + 1);
  std::vector<double> suffix(static_cast<std::size_t>(d) + 1);
  for (const auto& term : mk.measure().terms()) {
    for (Eigen::Index h = 0; h < d; ++h) {
      fv[static_cast<std::size_t>(h)] = eval_factor(term.factors[static_cast<std::size_t>(h)], x1[h], x2[h], l[h]);
    }
    prefix[0] = 1.0;
    for (std::size_t h = 0; h < fv.size(); ++h) prefix[h + 1] = prefix[h] * fv[h].value;
    suffix[fv.size()] = 1.0;
    for (std::size_t h = fv.size(); h-- > 0;) suffix[h] = suffix[h + 1] * fv[h].value;
    total += term.weight * prefix[fv.size()];
    for (std::size_t h = 0; h < fv.size(); ++h) {
      const double partial = both ? 2.0 * fv[h].d_first : fv[h].d_first;
      grad[static_cast<Eigen::Index>(h)] += term.weight * prefix[h] * suffix[h + 1] * partial;
    }
  }
  const double sf4 = mk.kernel().signal_variance() * mk.kernel().signal_variance();
  grad *= sf4;
  return sf4 * total;
}

}  // namespace

double erf_difference(double u, double v) {
  const double h = 0.5 * (u - v);
  if (std::abs(h) < 5e-7) {
    // erf(m+h) - erf(m-h) = 2h erf'(m) + h^3/3 erf'''(m) + O(h^5)
    const double m = 0.5 * (u + v);
    const double g = kTwoOverSqrtPi * std::exp(-m * m);
    return 2.0 * h * g + h * h * h / 3.0 * g * (4.0 * m * m - 2.0);
  }
  if (u > 0.0 && v > 0.0) return std::erfc(v) - std::erfc(u);
  if (u < 0.0 && v < 0.0) return std::erfc(-u) - std::erfc(-v);
  return std::erf(u) - std::erf(v);
}

MarginalKernel::MarginalKernel(SeArdKernel kernel, FiniteMeasure measure)
    : kernel_(std::move(kernel)), measure_(std::move(measure)) {
  kernel_.validate();
  if (measure_.dim() != kernel_.dim())
    throw InvalidArgument("MarginalKernel: measure and kernel dimensions differ");
}

double cross_marginal(const MarginalKernel& mk, const VecRef& x1, const VecRef& x2) {
  check_point(mk, x1.size());
  check_point(mk, x2.size());
  return marginal_value(mk, x1, x2);
}

Vec cross_marginal_gradient(const MarginalKernel& mk, const VecRef& x1, const VecRef& x2) {
  check_point(mk, x1.size());
  check_point(mk, x2.size());
  Vec g(mk.dim());
  marginal_with_gradient(mk, x1, x2, false, g);
  return g;
}

double single_marginal(const MarginalKernel& mk, const VecRef& x1) {
  return cross_marginal(mk, x1, x1);
}

Vec single_marginal_gradient(const MarginalKernel& mk, const VecRef& x) {
  check_point(mk, x.size());
  Vec g(mk.dim());
  marginal_with_gradient(mk, x, x, true, g);
  return g;
}

Mat data_marginal_matrix(const MarginalKernel& mk, const MatRef& inputs) {
  const Eigen::Index n = inputs.rows();
  Mat out(n, n);
  if (n == 0) return out;
  check_point(mk, inputs.cols());
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vec xj = inputs.row(j).transpose();
    for (Eigen::Index i = 0; i <= j; ++i) {
      out(i, j) = marginal_value(mk, inputs.row(i).transpose(), xj);
      out(j, i) = out(i, j);
    }
  }
  return out;
}

Vec cross_marginal_column(const MarginalKernel& mk, const MatRef& inputs, const VecRef& query,
                          Mat* jacobian) {
  check_point(mk, query.size());
  const Eigen::Index n = inputs.rows();
  Vec out(n);
  if (jacobian) jacobian->resize(n, mk.dim());
  Vec g(mk.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec xi = inputs.row(i).transpose();
    if (jacobian) {
      out[i] = marginal_with_gradient(mk, query, xi, false, g);
      jacobian->row(i) = g.transpose();
    } else {
      out[i] = marginal_value(mk, query, xi);
    }
  }
  return out;
}

void require_marginalizable(std::string_view kernel_family, std::string_view measure_kind) {
  static constexpr std::array<std::string_view, 5> measures = {"uniform_box", "diag_gaussian", "dirac",
                                                               "weighted_sum", "product"};
  bool known_measure = false;
  for (auto m : measures) known_measure = known_measure || m == measure_kind;
  if (!known_measure)
    throw UnsupportedError("unsupported measure kind '" + std::string(measure_kind) + "'");
  if (kernel_family == "se_ard") return;
  static constexpr std::array<std::string_view, 7> not_shipped = {
      "matern12", "matern32", "matern52", "polynomial", "wiener", "cosine", "rff"};
  for (auto k : not_shipped) {
    if (k == kernel_family)
      throw UnsupportedError("closed-form marginal for kernel '" + std::string(kernel_family) +
                             "' is not implemented");
  }
  if (kernel_family == "rational_quadratic" || kernel_family == "periodic")
    throw UnsupportedError("kernel '" + std::string(kernel_family) +
                           "' has no known closed-form marginal");
  throw UnsupportedError("unknown kernel family '" + std::string(kernel_family) + "'");
}

}  // namespace tsal
