#include "tsal/measures.hpp"

#include "tsal/errors.hpp"

#include <cmath>
#include <sstream>

namespace tsal {

namespace {

double factor_mass(const Factor1D& f) {
  if (const auto* iv = std::get_if<factor::Interval>(&f)) return iv->upper - iv->lower;
  return 1.0;
}

void require_finite_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

FiniteMeasure::FiniteMeasure(MeasureKind kind, Eigen::Index dim, std::vector<ProductTerm> terms)
    : kind_(kind), dim_(dim), terms_(std::move(terms)) {}

FiniteMeasure FiniteMeasure::uniform_box(Vec lower, Vec upper, double density) {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw InvalidArgument("uniform_box: bounds must be non-empty and of equal dimension");
  require_finite_positive(density, "uniform_box: density");
  ProductTerm term{density, {}};
  for (Eigen::Index h = 0; h < lower.size(); ++h) {
    if (!(lower[h] < upper[h]) || !std::isfinite(lower[h]) || !std::isfinite(upper[h]))
      throw InvalidArgument("uniform_box: lower bound must be strictly below upper bound");
    term.factors.emplace_back(factor::Interval{lower[h], upper[h]});
  }
  return FiniteMeasure(MeasureKind::UniformBox, lower.size(), {std::move(term)});
}

FiniteMeasure FiniteMeasure::uniform_probability(Vec lower, Vec upper, double mass_) {
  require_finite_positive(mass_, "uniform_probability: mass");
  FiniteMeasure box = uniform_box(lower, upper, 1.0);
  const double volume = box.mass();
  require_finite_positive(volume, "uniform_probability: volume");
  box.terms_.front().weight = mass_ / volume;
  return box;
}

FiniteMeasure FiniteMeasure::diag_gaussian(Vec mean, Vec stds, double scale) {
  if (mean.size() == 0 || mean.size() != stds.size())
    throw InvalidArgument("diag_gaussian: mean and stds must be non-empty and of equal dimension");
  require_finite_positive(scale, "diag_gaussian: scale");
  ProductTerm term{scale, {}};
  for (Eigen::Index h = 0; h < mean.size(); ++h) {
    require_finite_positive(stds[h], "diag_gaussian: std");
    term.factors.emplace_back(factor::Normal{mean[h], stds[h]});
  }
  return FiniteMeasure(MeasureKind::DiagGaussian, mean.size(), {std::move(term)});
}

FiniteMeasure FiniteMeasure::dirac(Vec point, double scale) {
  if (point.size() == 0) throw InvalidArgument("dirac: empty point");
  require_finite_positive(scale, "dirac: scale");
  ProductTerm term{scale, {}};
  for (Eigen::Index h = 0; h < point.size(); ++h) term.factors.emplace_back(factor::Atom{point[h]});
  return FiniteMeasure(MeasureKind::Dirac, point.size(), {std::move(term)});
}

FiniteMeasure FiniteMeasure::weighted_sum(
    const std::vector<std::pair<double, FiniteMeasure>>& parts) {
  if (parts.empty()) throw InvalidArgument("weighted_sum: no components");
  const Eigen::Index d = parts.front().second.dim();
  std::vector<ProductTerm> terms;
  for (const auto& [coef, mu] : parts) {
    if (mu.dim() != d) throw InvalidArgument("weighted_sum: components differ in dimension");
    if (!std::isfinite(coef)) throw InvalidArgument("weighted_sum: non-finite coefficient");
    for (const auto& t : mu.terms()) terms.push_back(ProductTerm{coef * t.weight, t.factors});
  }
  return FiniteMeasure(MeasureKind::WeightedSum, d, std::move(terms));
}

FiniteMeasure FiniteMeasure::product(const FiniteMeasure& a, const FiniteMeasure& b) {
  std::vector<ProductTerm> terms;
  terms.reserve(a.terms().size() * b.terms().size());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      ProductTerm t{ta.weight * tb.weight, ta.factors};
      t.factors.insert(t.factors.end(), tb.factors.begin(), tb.factors.end());
      terms.push_back(std::move(t));
    }
  }
  return FiniteMeasure(MeasureKind::Product, a.dim() + b.dim(), std::move(terms));
}

FiniteMeasure FiniteMeasure::power(const FiniteMeasure& base, int count) {
  if (count < 1) throw InvalidArgument("power: count must be at least 1");
  FiniteMeasure out = base;
  for (int i = 1; i < count; ++i) out = product(out, base);
  return out;
}

double FiniteMeasure::mass() const {
  double total = 0.0;
  for (const auto& t : terms_) {
    double m = t.weight;
    for (const auto& f : t.factors) m *= factor_mass(f);
    total += m;
  }
  return total;
}

bool FiniteMeasure::non_negative() const {
  for (const auto& t : terms_) {
    if (t.weight < 0.0) return false;
  }
  return true;
}

FiniteMeasure FiniteMeasure::scaled(double factor) const {
  FiniteMeasure out = *this;
  for (auto& t : out.terms_) t.weight *= factor;
  return out;
}

std::string FiniteMeasure::describe() const {
  static constexpr const char* names[] = {"uniform_box", "diag_gaussian", "dirac", "weighted_sum",
                                          "product"};
  std::ostringstream os;
  os << names[static_cast<int>(kind_)] << "(dim=" << dim_ << ", terms=" << terms_.size()
     << ", mass=" << mass() << ")";
  return os.str();
}

double mass(const FiniteMeasure& mu) { return mu.mass(); }

TimeSpaceMeasure product_time_space(const FiniteMeasure& time, const FiniteMeasure& space) {
  if (time.dim() != 1) throw InvalidArgument("product_time_space: time measure must be 1-dimensional");
  return TimeSpaceMeasure{time, space, FiniteMeasure::product(time, space)};
}

FiniteMeasure continuous_time_window(double t, double window) {
  if (!(window > 0.0)) throw InvalidArgument("continuous_time_window: window must be positive");
  return FiniteMeasure::uniform_box(Vec::Constant(1, t), Vec::Constant(1, t + window), 1.0);
}

FiniteMeasure discrete_time_window(double t, int window) {
  if (window < 0) throw InvalidArgument("discrete_time_window: window must be non-negative");
  if (window == 0) return FiniteMeasure::dirac(Vec::Constant(1, t));
  std::vector<std::pair<double, FiniteMeasure>> atoms;
  for (int i = 0; i <= window; ++i) atoms.emplace_back(1.0, FiniteMeasure::dirac(Vec::Constant(1, t + i)));
  return FiniteMeasure::weighted_sum(atoms);
}

}  // namespace tsal
