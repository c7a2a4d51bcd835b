#pragma once

#include "tsal/gp.hpp"
#include "tsal/safe_optimizer.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace tsal {

double mccormick(double u, double v);

/// -1 + 0.1 McCormick(R(t) x / 2) with R(t) the rotation by
/// 0.5 sin(a t / 10).  a = 5 is the standard seasonal system.
double eval_seasonal(double a, double t, double x1, double x2);

/// 8 |x1^2 - x2| + (1 - x1)^2
double drift_rosenbrock(double x1, double x2);

/// ((2 + sin(t / 2)) t + 1) (drift_rosenbrock(x1, x2) - 25 + t / 10) / 1000
double eval_drift(double t, double x1, double x2);

/// Synthetic NX system in the geometry of a rail-pressure experiment:
/// inputs (speed n, injection v), lag 4, safe iff output < 18.  This is a
/// smooth stand-in, not a physical model.  With scaled inputs
///   u = (n - n_ref) / n_scale,  w = (v - v_ref) / v_scale
/// the response is
///   c0 + a_u tanh(u_k) + a_w tanh(w_k) + a_uw tanh(u_k w_k)
///      + b_u tanh(g (u_k - u_{k-1})) + b_w tanh(g (w_k - w_{k-1}))
///      - b_lag tanh(g (u_{k-2} - u_{k-3})).
struct NxSurrogateParams {
  int lag = 4;
  double n_ref = 2250.0;
  double n_scale = 803.0;
  double v_ref = 18.7;
  double v_scale = 21.7;
  double c0 = 12.0;
  double a_u = 3.0;
  double a_w = 4.0;
  double a_uw = 1.5;
  double b_u = 2.0;
  double b_w = 1.5;
  double b_lag = 0.5;
  double gain = 5.0;
};

/// `history` holds params.lag input blocks (n, v), most recent first.
double nx_surrogate_eval(const NxSurrogateParams& params, const std::vector<Vec>& history);

namespace system {
struct Seasonal {
  double strength = 5.0;
};
struct Drift {};
struct NxSurrogate {
  NxSurrogateParams params;
};
}  // namespace system

using SystemVariant = std::variant<system::Seasonal, system::Drift, system::NxSurrogate>;

/// Ground-truth system.  Time-input systems take model inputs (t, x1, x2);
/// the NX system takes the stacked history (x_k, x_{k-1}, ..., x_{k-L+1}).
class SystemUnderTest {
 public:
  static SystemUnderTest seasonal(double strength = 5.0, double noise_std = 0.01);
  static SystemUnderTest drift(double noise_std = 0.01);
  static SystemUnderTest nx_surrogate(NxSurrogateParams params = {}, double noise_std = 0.01);

  [[nodiscard]] const SystemVariant& variant() const { return variant_; }
  [[nodiscard]] std::string name() const;
  [[nodiscard]] bool time_input() const { return !std::holds_alternative<system::NxSurrogate>(variant_); }
  /// Dimension of one input block (2 for every shipped system).
  [[nodiscard]] Eigen::Index base_dim() const { return 2; }
  /// 1 for time-input systems, the NX lag otherwise.
  [[nodiscard]] int lag() const;
  /// Dimension of the model input.
  [[nodiscard]] Eigen::Index model_dim() const;

  [[nodiscard]] const Box& domain() const { return domain_; }
  [[nodiscard]] const Box& initial_safe_region() const { return initial_safe_; }
  /// Outputs strictly below the threshold are safe.
  [[nodiscard]] double threshold() const { return threshold_; }
  [[nodiscard]] double noise_std() const { return noise_std_; }

  /// Noise-free output at a model input.
  [[nodiscard]] double evaluate(const VecRef& model_input) const;
  /// threshold - output; >= 0 means safe.
  [[nodiscard]] double safety_indicator(const VecRef& model_input) const;

 private:
  SystemUnderTest(SystemVariant v, Box domain, Box initial_safe, double threshold, double noise_std);

  SystemVariant variant_;
  Box domain_;
  Box initial_safe_;
  double threshold_;
  double noise_std_;
};

struct GridPoint {
  Vec input;  // spatial input (x1, x2)
  double target;
};

/// resolution x resolution grid over the spatial domain at time t, keeping
/// the points whose noise-free output is below the threshold.
std::vector<GridPoint> safe_area_test_grid(const SystemUnderTest& system, double t, int resolution);

/// Trajectory of `length` input blocks starting at the centre of the
/// initial safe region.  Each step is drawn uniformly from the ellipse
/// around the previous block and accepted only if the output stays safe.
std::vector<Vec> random_safe_trajectory(const SystemUnderTest& system, int length, const Vec& semi_axes,
                                        std::uint64_t seed);

/// Stacks blocks trajectory[k], trajectory[k-1], ... (clamped at index 0).
Vec nx_context(const std::vector<Vec>& trajectory, std::size_t k, int lag);

}  // namespace tsal
