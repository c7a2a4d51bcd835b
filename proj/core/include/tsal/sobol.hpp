#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>

namespace tsal {

/// Sobol low-discrepancy sequence in [0, 1)^d (d <= 16, Joe-Kuo direction
/// numbers, Gray-code ordering).  The first point is the origin.
class SobolSequence {
 public:
  static constexpr int kMaxDim = 16;

  explicit SobolSequence(int dim);

  [[nodiscard]] int dim() const { return dim_; }
  Eigen::VectorXd next();
  /// Skips `count` points.
  void skip(std::uint64_t count);

 private:
  int dim_;
  std::uint64_t index_ = 0;
  std::array<std::array<std::uint32_t, 32>, kMaxDim> v_{};
  std::array<std::uint32_t, kMaxDim> x_{};
};

/// First `n` points as rows of an n x d matrix.
Eigen::MatrixXd sobol_points(int n, int dim);

}  // namespace tsal
