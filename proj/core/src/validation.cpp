#include "tsal/validation.hpp"

#include "tsal/acquisition.hpp"
#include "tsal/errors.hpp"
#include "tsal/kernel_marginals.hpp"
#include "tsal/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace tsal {

namespace {

constexpr int kLegendreNodes[] = {0, 96, 60, 36, 24};
constexpr int kHermiteNodes[] = {0, 96, 60, 40, 28};

struct Config {
  SeArdKernel kernel;
  FiniteMeasure measure = FiniteMeasure::dirac(Vec::Zero(1));
  QuadratureRule rule;
  std::string label;
};

Config draw(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto in = [&](double a, double b) { return a + (b - a) * u(rng); };
  Vec l(d);
  for (int h = 0; h < d; ++h) l[h] = in(0.5, 2.0);
  Config c{SeArdKernel(l, in(0.5, 2.0), in(0.02, 0.3)), FiniteMeasure::dirac(Vec::Zero(d)), {}, {}};

  auto box = [&](int dim, const Vec& scales) {
    Vec lo(dim);
    Vec hi(dim);
    for (int h = 0; h < dim; ++h) {
      lo[h] = in(-2.0, 0.0);
      hi[h] = lo[h] + in(0.5, 4.0) * scales[h];
    }
    return FiniteMeasure::uniform_box(lo, hi, in(0.2, 2.0));
  };
  auto gauss = [&](int dim, const Vec& scales) {
    Vec m(dim);
    Vec s(dim);
    for (int h = 0; h < dim; ++h) {
      m[h] = in(-1.0, 1.0);
      s[h] = in(0.2, 1.0) * scales[h];
    }
    return FiniteMeasure::diag_gaussian(m, s, in(0.5, 3.0));
  };

  const int kind = static_cast<int>(u(rng) * 4.0);
  const bool hermite = u(rng) < 0.4;
  auto base = [&](int dim, const Vec& scales) { return hermite ? gauss(dim, scales) : box(dim, scales); };
  switch (kind) {
    case 0:
      c.measure = base(d, l);
      c.label = hermite ? "gaussian" : "box";
      break;
    case 1:
      c.measure = FiniteMeasure::weighted_sum({{1.0, base(d, l)}, {-in(0.05, 0.4), base(d, l)}});
      c.label = hermite ? "signed sum of gaussians" : "signed sum of boxes";
      break;
    case 2:
      c.measure = FiniteMeasure::weighted_sum({{in(0.5, 2.0), base(d, l)}, {in(0.5, 2.0), base(d, l)}});
      c.label = hermite ? "sum of gaussians" : "sum of boxes";
      break;
    default:
      if (d == 1) {
        c.measure = base(d, l);
        c.label = hermite ? "gaussian" : "box";
      } else {
        Vec at(1);
        at[0] = in(-1.0, 1.0);
        c.measure = FiniteMeasure::product(FiniteMeasure::dirac(at), base(d - 1, l.tail(d - 1)));
        c.label = hermite ? "point x gaussian" : "point x box";
      }
  }
  if (hermite) {
    c.rule = quad::GaussHermite{kHermiteNodes[d]};
  } else {
    c.rule = quad::GaussLegendre{kLegendreNodes[d]};
  }
  return c;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

double ValidationReport::max_rel_err() const { return std::max(max_rel_err_marginal, max_rel_err_evaluate); }

ValidationReport run_validation_sweep(int samples, std::uint64_t seed, int max_dim) {
  if (samples < 1) throw InvalidArgument("validation: samples must be >= 1");
  if (max_dim < 1 || max_dim > 4) throw InvalidArgument("validation: max_dim must lie in [1, 4]");
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ValidationReport rep;
  double worst = -1.0;
  for (int s = 0; s < samples; ++s) {
    const int d = 1 + static_cast<int>(u(rng) * max_dim);
    const Config c = draw(rng, d);
    auto point = [&] {
      Vec x(d);
      for (int h = 0; h < d; ++h) x[h] = -1.5 + 3.0 * u(rng);
      return x;
    };
    const MarginalKernel mk(c.kernel, c.measure);
    const Vec x1 = point();
    const Vec x2 = point();
    const double closed = cross_marginal(mk, x1, x2);
    const double numeric = integrate(c.rule, c.measure, [&](const Vec& r) {
      return kernel_eval(c.kernel, x1, r) * kernel_eval(c.kernel, r, x2);
    });
    const double e1 = rel_err(closed, numeric);
    rep.max_rel_err_marginal = std::max(rep.max_rel_err_marginal, e1);

    const int n = static_cast<int>(u(rng) * 7.0);
    Mat inputs(n, d);
    Vec targets(n);
    for (int i = 0; i < n; ++i) {
      inputs.row(i) = point().transpose();
      targets[i] = 2.0 * u(rng) - 1.0;
    }
    GpModel model(c.kernel, 0.0, inputs, targets);
    model.fit();
    const Vec cand = point();
    const auto ws = AcquisitionWorkspace::build(model, acq::Imspe{c.measure});
    const double value = ws.evaluate(cand);
    const double brute = imspe_bruteforce(model, c.measure, cand, c.rule);
    const double e2 = rel_err(value, brute);
    rep.max_rel_err_evaluate = std::max(rep.max_rel_err_evaluate, e2);

    if (std::max(e1, e2) > worst) {
      worst = std::max(e1, e2);
      std::ostringstream msg;
      msg << "sample " << s << ": d=" << d << ", n=" << n << ", " << c.label << ", marginal err " << e1
          << ", evaluate err " << e2;
      rep.worst = msg.str();
    }
    ++rep.samples;
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace tsal
