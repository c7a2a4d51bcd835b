#pragma once

#include "tsal/gp.hpp"
#include "tsal/measures.hpp"

#include <functional>
#include <variant>
#include <vector>

namespace tsal {

namespace quad {
/// Tensor Gauss-Legendre; pairs with interval factors.
struct GaussLegendre {
  int nodes = 32;
};
/// Tensor Gauss-Hermite (probabilists'); pairs with normal factors.
struct GaussHermite {
  int nodes = 40;
};
/// Nested adaptive Simpson with absolute tolerance; pairs with interval factors.
struct AdaptiveSimpson {
  double tolerance = 1e-10;
  int max_depth = 30;
};
}  // namespace quad

using QuadratureRule = std::variant<quad::GaussLegendre, quad::GaussHermite, quad::AdaptiveSimpson>;

/// Hard cap on tensor nodes per product term.
inline constexpr double kMaxQuadratureNodes = 1e7;

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes and weights on [-1, 1] (weights sum to 2), Golub-Welsch.
Rule1D gauss_legendre(int n);
/// Nodes and weights for the standard normal density (weights sum to 1).
Rule1D gauss_hermite(int n);

using Integrand = std::function<double(const Vec&)>;

/// Integral of f against mu, term by term.  Point-mass factors are fixed
/// coordinates.  Throws InvalidArgument if a factor does not pair with the
/// rule and ResourceError above kMaxQuadratureNodes.
double integrate(const QuadratureRule& rule, const FiniteMeasure& mu, const Integrand& f);

/// Integrated posterior variance after appending `candidate` to the model's
/// data, computed by factoring the (n+1) x (n+1) covariance once and
/// evaluating the conditioned variance at every quadrature node.  The
/// candidate is treated like a training input (same diagonal shift).
double imspe_bruteforce(const GpModel& model, const FiniteMeasure& mu, const VecRef& candidate,
                        const QuadratureRule& rule);

/// Integrated posterior variance of the model itself.
double integrated_variance_bruteforce(const GpModel& model, const FiniteMeasure& mu, const QuadratureRule& rule);

}  // namespace tsal
