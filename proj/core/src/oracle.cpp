#include "tsal/oracle.hpp"

#include "tsal/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tsal {

namespace {

Rule1D golub_welsch(int n, const std::function<double(int)>& offdiag, double mu0) {
  Mat jacobi = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k, k - 1) = offdiag(k);
    jacobi(k - 1, k) = offdiag(k);
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(jacobi);
  Rule1D r;
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(eig.eigenvalues()[i]);
    const double v0 = eig.eigenvectors()(0, i);
    r.weights.push_back(mu0 * v0 * v0);
  }
  return r;
}

// One-dimensional view of a factor under a tensor rule.
Rule1D factor_rule(const Factor1D& f, const QuadratureRule& rule) {
  if (const auto* a = std::get_if<factor::Atom>(&f)) return Rule1D{{a->at}, {1.0}};
  if (const auto* gl = std::get_if<quad::GaussLegendre>(&rule)) {
    const auto* iv = std::get_if<factor::Interval>(&f);
    if (!iv) throw InvalidArgument("integrate: Gauss-Legendre needs interval factors");
    Rule1D base = gauss_legendre(gl->nodes);
    const double half = 0.5 * (iv->upper - iv->lower);
    const double mid = 0.5 * (iv->upper + iv->lower);
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      base.nodes[i] = mid + half * base.nodes[i];
      base.weights[i] *= half;
    }
    return base;
  }
  const auto& gh = std::get<quad::GaussHermite>(rule);
  const auto* nm = std::get_if<factor::Normal>(&f);
  if (!nm) throw InvalidArgument("integrate: Gauss-Hermite needs normal factors");
  Rule1D base = gauss_hermite(gh.nodes);
  for (double& x : base.nodes) x = nm->mean + nm->std * x;
  return base;
}

double tensor_term(const ProductTerm& term, const QuadratureRule& rule, const Integrand& f) {
  std::vector<Rule1D> rules;
  double count = 1.0;
  for (const auto& fac : term.factors) {
    rules.push_back(factor_rule(fac, rule));
    count *= static_cast<double>(rules.back().nodes.size());
  }
  if (count > kMaxQuadratureNodes) throw ResourceError("integrate: tensor grid exceeds the node guard");
  const std::size_t d = rules.size();
  std::vector<std::size_t> idx(d, 0);
  Vec x(static_cast<Eigen::Index>(d));
  double total = 0.0;
  for (;;) {
    double w = 1.0;
    for (std::size_t h = 0; h < d; ++h) {
      x[static_cast<Eigen::Index>(h)] = rules[h].nodes[idx[h]];
      w *= rules[h].weights[idx[h]];
    }
    total += w * f(x);
    std::size_t h = 0;
    while (h < d && ++idx[h] == rules[h].nodes.size()) idx[h++] = 0;
    if (h == d) break;
  }
  return term.weight * total;
}

class NestedSimpson {
 public:
  NestedSimpson(const ProductTerm& term, const quad::AdaptiveSimpson& rule, const Integrand& f)
      : term_(term), rule_(rule), f_(f), x_(static_cast<Eigen::Index>(term.factors.size())) {
    for (const auto& fac : term.factors) {
      if (!std::holds_alternative<factor::Interval>(fac) && !std::holds_alternative<factor::Atom>(fac))
        throw InvalidArgument("integrate: adaptive Simpson needs interval factors");
    }
  }

  double run() { return dim(0); }

 private:
  double dim(std::size_t h) {
    if (h == term_.factors.size()) return f_(x_);
    const auto hh = static_cast<Eigen::Index>(h);
    if (const auto* a = std::get_if<factor::Atom>(&term_.factors[h])) {
      x_[hh] = a->at;
      return dim(h + 1);
    }
    const auto& iv = std::get<factor::Interval>(term_.factors[h]);
    auto g = [&](double t) {
      x_[hh] = t;
      return dim(h + 1);
    };
    const double a = iv.lower;
    const double b = iv.upper;
    const double fa = g(a);
    const double fb = g(b);
    const double m = 0.5 * (a + b);
    const double fm = g(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return refine(g, a, b, fa, fm, fb, whole, rule_.tolerance, rule_.max_depth);
  }

  template <class G>
  double refine(G& g, double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = g(lm);
    const double frm = g(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return refine(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           refine(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }

  const ProductTerm& term_;
  const quad::AdaptiveSimpson& rule_;
  const Integrand& f_;
  Vec x_;
};

void check_rule(const QuadratureRule& rule) {
  if (const auto* gl = std::get_if<quad::GaussLegendre>(&rule); gl && gl->nodes < 2)
    throw InvalidArgument("quadrature: at least two nodes required");
  if (const auto* gh = std::get_if<quad::GaussHermite>(&rule); gh && gh->nodes < 2)
    throw InvalidArgument("quadrature: at least two nodes required");
  if (const auto* as = std::get_if<quad::AdaptiveSimpson>(&rule); as && !(as->tolerance > 0.0))
    throw InvalidArgument("quadrature: tolerance must be positive");
}

}  // namespace

Rule1D gauss_legendre(int n) {
  if (n < 2) throw InvalidArgument("gauss_legendre: at least two nodes required");
  return golub_welsch(
      n, [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); }, 2.0);
}

Rule1D gauss_hermite(int n) {
  if (n < 2) throw InvalidArgument("gauss_hermite: at least two nodes required");
  return golub_welsch(
      n, [](int k) { return std::sqrt(static_cast<double>(k)); }, 1.0);
}

double integrate(const QuadratureRule& rule, const FiniteMeasure& mu, const Integrand& f) {
  check_rule(rule);
  double total = 0.0;
  for (const auto& term : mu.terms()) {
    if (const auto* as = std::get_if<quad::AdaptiveSimpson>(&rule)) {
      total += term.weight * NestedSimpson(term, *as, f).run();
    } else {
      total += tensor_term(term, rule, f);
    }
  }
  return total;
}

double imspe_bruteforce(const GpModel& model, const FiniteMeasure& mu, const VecRef& candidate,
                        const QuadratureRule& rule) {
  if (!model.fitted()) throw StateError("imspe_bruteforce: model is not fitted");
  if (candidate.size() != model.dim() || mu.dim() != model.dim())
    throw InvalidArgument("imspe_bruteforce: dimension mismatch");
  const Eigen::Index n = model.size();
  Mat x(n + 1, model.dim());
  x.topRows(n) = model.inputs();
  x.row(n) = candidate.transpose();
  Mat cov = kernel_matrix(model.kernel(), x, x);
  cov.diagonal().array() += model.diagonal_shift();
  Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericalError("imspe_bruteforce: augmented covariance not factorizable");
  const Mat lower = llt.matrixL();
  const double sf2 = model.kernel().signal_variance();
  Vec kr(n + 1);
  return integrate(rule, mu, [&](const Vec& r) {
    kr = kernel_vector(model.kernel(), x, r);
    lower.triangularView<Eigen::Lower>().solveInPlace(kr);
    return sf2 - kr.squaredNorm();
  });
}

double integrated_variance_bruteforce(const GpModel& model, const FiniteMeasure& mu, const QuadratureRule& rule) {
  if (mu.dim() != model.dim()) throw InvalidArgument("integrated_variance_bruteforce: dimension mismatch");
  return integrate(rule, mu, [&](const Vec& r) { return model.posterior(r).variance; });
}

}  // namespace tsal
