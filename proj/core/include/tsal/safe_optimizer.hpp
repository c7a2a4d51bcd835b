#pragma once

#include "tsal/acquisition.hpp"
#include "tsal/gp.hpp"

#include <cstdint>
#include <optional>
#include <variant>

namespace tsal {

/// Axis-aligned box [lower, upper].
struct Box {
  Vec lower;
  Vec upper;

  [[nodiscard]] Eigen::Index dim() const { return lower.size(); }
  [[nodiscard]] bool contains(const VecRef& x, double slack = 0.0) const;
  [[nodiscard]] Vec center() const { return 0.5 * (lower + upper); }
  /// Throws InvalidArgument unless lower < upper componentwise.
  void validate() const;
};

enum class ConstraintForm { MeanPlusTwoSigma };

/// Candidate x is considered safe when
///   m_safe(x) + 2 sqrt(k_safe(x)) < threshold,
/// i.e. the safety probability exceeds alpha = Phi(2).
struct SafetyConfig {
  GpModel safety_model;
  double threshold = 0.0;
  double alpha = 0.977;
  ConstraintForm form = ConstraintForm::MeanPlusTwoSigma;

  void validate() const;
};

/// Phi((threshold - m) / sqrt(k)) at the full model input `x`.
double safety_probability(const SafetyConfig& cfg, const VecRef& x);
/// m + 2 sqrt(k) - threshold at `x`; negative means safe.
double safety_margin(const SafetyConfig& cfg, const VecRef& x, Vec* gradient = nullptr);

namespace step {
struct None {};
struct Box {
  Vec lower;
  Vec upper;
};
/// sum_h ((x_h - previous_h) / semi_axes_h)^2 <= 1
struct EllipseAroundPrevious {
  Vec semi_axes;
  Vec previous;
};
}  // namespace step

using StepConstraint = std::variant<step::None, step::Box, step::EllipseAroundPrevious>;

struct SelectOptions {
  int starts = 3;
  int max_restarts = 5;
  int max_iterations = 200;
  double tolerance = 1e-4;
  /// Penalty activates at margin > -safety_margin.
  double safety_margin = 1e-6;
  int max_rejections = 1000;
  /// Start point used when rejection sampling fails (usually the previous
  /// input); must be feasible to be used.
  std::optional<Vec> fallback;
};

struct Selection {
  Vec point;
  /// evaluate() for integrated variants, posterior variance for entropy.
  double acquisition_value = 0.0;
  int run = 0;
};

/// Multistart projected-gradient search for the best safe candidate inside
/// `domain` and the step region.  The safety model is queried at
/// ws.embed(candidate).  Deterministic in `seed`; nullopt if no run ends at
/// a feasible point.
std::optional<Selection> select_next(const AcquisitionWorkspace& ws, const SafetyConfig* safety,
                                     const StepConstraint& step, const Box& domain, std::uint64_t seed,
                                     const SelectOptions& options = {});

/// Whether `x` lies in domain and step region and is safe (if `safety`).
bool is_feasible(const AcquisitionWorkspace& ws, const SafetyConfig* safety, const StepConstraint& step,
                 const Box& domain, const VecRef& x, double slack = 1e-8);

}  // namespace tsal
