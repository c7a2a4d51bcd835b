#pragma once

#include "tsal/gp.hpp"
#include "tsal/kernel_marginals.hpp"
#include "tsal/measures.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace tsal {

namespace acq {
/// Posterior variance at the candidate (maximized).  `prefix` and `suffix`
/// are fixed model-input coordinates placed around the candidate, e.g. the
/// current time or the NX history.
struct Entropy {
  Vec prefix;
  Vec suffix;
};
/// Integrated posterior variance over `measure` (minimized).
struct Imspe {
  FiniteMeasure measure;
};
/// Model input is (t, x); the candidate x is placed at `current_time` and
/// the variance is integrated over `measure.joint`.
struct TimspeTimeInput {
  TimeSpaceMeasure measure;
  double current_time = 0.0;
};
/// Model input is (x_k, x_{k-1}, ..., x_{k-L+1}).  `history` holds the
/// L - 1 previous blocks, most recent first; the variance is integrated over
/// space_measure^L.
struct TimspeNx {
  FiniteMeasure space_measure;
  int lag = 1;
  std::vector<Vec> history;
};
}  // namespace acq

using AcquisitionSpec = std::variant<acq::Entropy, acq::Imspe, acq::TimspeTimeInput, acq::TimspeNx>;

/// Per-step precomputation for one fitted model and one acquisition.  After
/// build(), every candidate costs O(n^2): two triangular solves against the
/// cached Cholesky factor plus O(n d) marginal evaluations.
///
/// For the integrated variants
///   evaluate(x*) = i1 - i2 - Q(x*) / S(x*)
/// with i1 = sf^2 mass(mu), i2 = sum_ij (K~^-1)_ij M_ij and
/// S(x*) the Schur complement of the candidate in the augmented covariance.
class AcquisitionWorkspace {
 public:
  /// `model` must be fitted.  Throws InvalidArgument on dimension mismatch.
  static AcquisitionWorkspace build(const GpModel& model, AcquisitionSpec spec);

  [[nodiscard]] const GpModel& model() const { return model_; }
  [[nodiscard]] const AcquisitionSpec& spec() const { return spec_; }
  [[nodiscard]] bool is_entropy() const { return std::holds_alternative<acq::Entropy>(spec_); }
  /// Dimension of the candidate block.
  [[nodiscard]] Eigen::Index candidate_dim() const { return candidate_dim_; }
  /// Index of the first candidate coordinate inside the model input.
  [[nodiscard]] Eigen::Index candidate_offset() const { return prefix_.size(); }
  /// Full model input for a candidate.
  [[nodiscard]] Vec embed(const VecRef& candidate) const;

  /// Only for integrated variants.
  [[nodiscard]] const MarginalKernel& marginal() const;
  [[nodiscard]] double i1_term() const { return i1_; }
  [[nodiscard]] double i2_term() const { return i2_; }
  [[nodiscard]] const Mat& data_marginal() const { return data_marginal_; }
  /// Integrated variance of the current model, i1 - i2.
  [[nodiscard]] double integrated_variance() const { return i1_ - i2_; }

  /// Integrated posterior variance after adding the candidate.  Throws
  /// DegenerateCandidate when S falls below 1e-12 sf^2 and StateError for
  /// the entropy variant.
  [[nodiscard]] double evaluate(const VecRef& candidate) const;
  [[nodiscard]] Vec evaluate_gradient(const VecRef& candidate) const;
  double evaluate_with_gradient(const VecRef& candidate, Vec& gradient) const;
  [[nodiscard]] std::optional<double> try_evaluate(const VecRef& candidate) const;

  /// Posterior variance at the embedded candidate.
  [[nodiscard]] double evaluate_entropy(const VecRef& candidate) const;
  double evaluate_entropy_with_gradient(const VecRef& candidate, Vec& gradient) const;

  /// Quantity minimized by the optimizer: evaluate() for integrated
  /// variants, minus the variance for entropy.  nullopt on degenerate
  /// candidates.
  std::optional<double> objective(const VecRef& candidate, Vec* gradient = nullptr) const;

 private:
  AcquisitionWorkspace(GpModel model, AcquisitionSpec spec);
  double integrated(const VecRef& candidate, Vec* gradient) const;

  GpModel model_;
  AcquisitionSpec spec_;
  std::optional<MarginalKernel> marginal_;
  Vec prefix_;
  Vec suffix_;
  Eigen::Index candidate_dim_ = 0;
  double i1_ = 0.0;
  double i2_ = 0.0;
  Mat data_marginal_;
};

/// Relative Schur-complement floor below which a candidate is degenerate.
inline constexpr double kDegenerateFloor = 1e-12;

}  // namespace tsal
