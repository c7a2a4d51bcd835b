#pragma once

#include "tsal/gp.hpp"

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tsal {

/// One-dimensional building blocks of a product measure.
namespace factor {
/// Lebesgue measure restricted to [lower, upper].
struct Interval {
  double lower;
  double upper;
};
/// Normal probability measure N(mean, std^2).
struct Normal {
  double mean;
  double std;
};
/// Unit point mass.
struct Atom {
  double at;
};
}  // namespace factor

using Factor1D = std::variant<factor::Interval, factor::Normal, factor::Atom>;

/// weight * (f_1 x f_2 x ... x f_d)
struct ProductTerm {
  double weight = 1.0;
  std::vector<Factor1D> factors;
};

enum class MeasureKind { UniformBox, DiagGaussian, Dirac, WeightedSum, Product };

/// Finite measure on R^d used to average posterior variance.
///
/// Every measure is kept as a signed sum of product terms; each term is a
/// weight times a tensor product of one-dimensional factors.  This covers
/// uniform boxes (density `scale` on [a, b]), diagonal Gaussians with total
/// mass `scale`, point masses, weighted sums (coefficients may be negative)
/// and products over coordinate blocks.  Immutable after construction.
class FiniteMeasure {
 public:
  /// Constant density `density` on the box [lower, upper]; mass = density * volume.
  static FiniteMeasure uniform_box(Vec lower, Vec upper, double density = 1.0);
  /// Uniform measure on [lower, upper] with total mass `mass`.
  static FiniteMeasure uniform_probability(Vec lower, Vec upper, double mass = 1.0);
  /// scale * N(mean, diag(stds^2)).
  static FiniteMeasure diag_gaussian(Vec mean, Vec stds, double scale = 1.0);
  /// scale * delta_point.
  static FiniteMeasure dirac(Vec point, double scale = 1.0);
  static FiniteMeasure weighted_sum(const std::vector<std::pair<double, FiniteMeasure>>& parts);
  /// Product measure on R^{d_a + d_b}, coordinates of `a` first.
  static FiniteMeasure product(const FiniteMeasure& a, const FiniteMeasure& b);
  /// `base` x `base` x ... (`count` copies).
  static FiniteMeasure power(const FiniteMeasure& base, int count);

  [[nodiscard]] Eigen::Index dim() const { return dim_; }
  [[nodiscard]] MeasureKind kind() const { return kind_; }
  [[nodiscard]] const std::vector<ProductTerm>& terms() const { return terms_; }
  [[nodiscard]] double mass() const;
  /// True if every term weight is non-negative.
  [[nodiscard]] bool non_negative() const;
  /// Same measure with every weight multiplied by `factor`.
  [[nodiscard]] FiniteMeasure scaled(double factor) const;

  [[nodiscard]] std::string describe() const;

 private:
  FiniteMeasure(MeasureKind kind, Eigen::Index dim, std::vector<ProductTerm> terms);

  MeasureKind kind_ = MeasureKind::Dirac;
  Eigen::Index dim_ = 0;
  std::vector<ProductTerm> terms_;
};

double mass(const FiniteMeasure& mu);

/// Product of a one-dimensional time measure and a spatial measure; the
/// joint measure lives on (t, x) with time as the first coordinate.
struct TimeSpaceMeasure {
  FiniteMeasure time;
  FiniteMeasure space;
  FiniteMeasure joint;

  [[nodiscard]] double mass() const { return joint.mass(); }
};

TimeSpaceMeasure product_time_space(const FiniteMeasure& time, const FiniteMeasure& space);

/// Lebesgue measure on [t, t + window].
FiniteMeasure continuous_time_window(double t, double window);
/// Unit point masses at t, t + 1, ..., t + window (window must be a
/// non-negative integer); window = 0 gives a single Dirac at t.
FiniteMeasure discrete_time_window(double t, int window);

}  // namespace tsal
