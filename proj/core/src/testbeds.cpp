#include "tsal/testbeds.hpp"

#include "tsal/errors.hpp"

#include <cmath>
#include <random>

namespace tsal {

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

double mccormick(double u, double v) { return std::sin(u + v) + (u - v) * (u - v) - 1.5 * u + 2.5 * v + 1.0; }

double eval_seasonal(double a, double t, double x1, double x2) {
  const double theta = 0.5 * std::sin(a * t / 10.0);
  const double c = 0.5 * std::cos(theta);
  const double s = 0.5 * std::sin(theta);
  return -1.0 + 0.1 * mccormick(c * x1 - s * x2, s * x1 + c * x2);
}

double drift_rosenbrock(double x1, double x2) { return 8.0 * std::abs(x1 * x1 - x2) + (1.0 - x1) * (1.0 - x1); }

double eval_drift(double t, double x1, double x2) {
  return ((2.0 + std::sin(t / 2.0)) * t + 1.0) * (drift_rosenbrock(x1, x2) - 25.0 + t / 10.0) / 1000.0;
}

double nx_surrogate_eval(const NxSurrogateParams& p, const std::vector<Vec>& history) {
  if (p.lag != 4) throw InvalidArgument("nx_surrogate_eval: the surrogate is defined for lag 4");
  if (static_cast<int>(history.size()) != p.lag)
    throw InvalidArgument("nx_surrogate_eval: history must hold exactly `lag` blocks");
  double u[4];
  double w[4];
  for (std::size_t i = 0; i < 4; ++i) {
    if (history[i].size() != 2) throw InvalidArgument("nx_surrogate_eval: blocks must be (n, v)");
    u[i] = (history[i][0] - p.n_ref) / p.n_scale;
    w[i] = (history[i][1] - p.v_ref) / p.v_scale;
  }
  return p.c0 + p.a_u * std::tanh(u[0]) + p.a_w * std::tanh(w[0]) + p.a_uw * std::tanh(u[0] * w[0]) +
         p.b_u * std::tanh(p.gain * (u[0] - u[1])) + p.b_w * std::tanh(p.gain * (w[0] - w[1])) -
         p.b_lag * std::tanh(p.gain * (u[2] - u[3]));
}

SystemUnderTest::SystemUnderTest(SystemVariant v, Box domain, Box initial_safe, double threshold, double noise_std)
    : variant_(std::move(v)), domain_(std::move(domain)), initial_safe_(std::move(initial_safe)),
      threshold_(threshold), noise_std_(noise_std) {
  if (!(noise_std_ >= 0.0)) throw InvalidArgument("SystemUnderTest: noise std must be non-negative");
  domain_.validate();
  initial_safe_.validate();
}

SystemUnderTest SystemUnderTest::seasonal(double strength, double noise_std) {
  return {system::Seasonal{strength}, Box{vec2(-4, -4), vec2(4, 4)}, Box{vec2(-0.5, -1), vec2(0.5, 1)}, 0.0,
          noise_std};
}

SystemUnderTest SystemUnderTest::drift(double noise_std) {
  return {system::Drift{}, Box{vec2(-4, -4), vec2(4, 4)}, Box{vec2(-0.5, -1), vec2(0.5, 1)}, 0.0, noise_std};
}

SystemUnderTest SystemUnderTest::nx_surrogate(NxSurrogateParams params, double noise_std) {
  return {system::NxSurrogate{params}, Box{vec2(1000, 0), vec2(4000, 60)}, Box{vec2(2093, 14.36), vec2(2414, 23.0)},
          18.0, noise_std};
}

std::string SystemUnderTest::name() const {
  if (std::holds_alternative<system::Seasonal>(variant_)) return "seasonal";
  if (std::holds_alternative<system::Drift>(variant_)) return "drift";
  return "nx_surrogate";
}

int SystemUnderTest::lag() const {
  if (const auto* nx = std::get_if<system::NxSurrogate>(&variant_)) return nx->params.lag;
  return 1;
}

Eigen::Index SystemUnderTest::model_dim() const { return time_input() ? 3 : 2 * lag(); }

double SystemUnderTest::evaluate(const VecRef& x) const {
  if (x.size() != model_dim()) throw InvalidArgument("SystemUnderTest::evaluate: input dimension mismatch");
  if (const auto* s = std::get_if<system::Seasonal>(&variant_)) return eval_seasonal(s->strength, x[0], x[1], x[2]);
  if (std::holds_alternative<system::Drift>(variant_)) return eval_drift(x[0], x[1], x[2]);
  const auto& nx = std::get<system::NxSurrogate>(variant_);
  std::vector<Vec> history;
  for (int i = 0; i < nx.params.lag; ++i) history.push_back(x.segment(2 * i, 2));
  return nx_surrogate_eval(nx.params, history);
}

double SystemUnderTest::safety_indicator(const VecRef& x) const { return threshold_ - evaluate(x); }

std::vector<GridPoint> safe_area_test_grid(const SystemUnderTest& system, double t, int resolution) {
  if (resolution < 2) throw InvalidArgument("safe_area_test_grid: resolution must be >= 2");
  if (!system.time_input()) throw InvalidArgument("safe_area_test_grid: needs a time-input system");
  const Box& d = system.domain();
  std::vector<GridPoint> out;
  Vec input(3);
  input[0] = t;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      input[1] = d.lower[0] + (d.upper[0] - d.lower[0]) * i / (resolution - 1);
      input[2] = d.lower[1] + (d.upper[1] - d.lower[1]) * j / (resolution - 1);
      const double y = system.evaluate(input);
      if (y < system.threshold()) out.push_back({input.tail(2), y});
    }
  }
  return out;
}

Vec nx_context(const std::vector<Vec>& trajectory, std::size_t k, int lag) {
  if (trajectory.empty() || k >= trajectory.size()) throw InvalidArgument("nx_context: index out of range");
  const Eigen::Index b = trajectory[0].size();
  Vec out(b * lag);
  for (int i = 0; i < lag; ++i) {
    const std::size_t idx = k >= static_cast<std::size_t>(i) ? k - static_cast<std::size_t>(i) : 0;
    out.segment(b * i, b) = trajectory[idx];
  }
  return out;
}

std::vector<Vec> random_safe_trajectory(const SystemUnderTest& system, int length, const Vec& semi_axes,
                                        std::uint64_t seed) {
  if (system.time_input()) throw InvalidArgument("random_safe_trajectory: needs an NX system");
  if (length < 1) throw InvalidArgument("random_safe_trajectory: length must be >= 1");
  const Box& d = system.domain();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Vec> traj{system.initial_safe_region().center()};
  while (static_cast<int>(traj.size()) < length) {
    bool placed = false;
    for (int tries = 0; tries < 1000 && !placed; ++tries) {
      Vec step(2);
      step << unit(rng), unit(rng);
      if (step.squaredNorm() > 1.0) continue;
      const Vec next = traj.back() + step.cwiseProduct(semi_axes);
      if (!d.contains(next)) continue;
      traj.push_back(next);
      if (system.safety_indicator(nx_context(traj, traj.size() - 1, system.lag())) > 0.0) {
        placed = true;
      } else {
        traj.pop_back();
      }
    }
    if (!placed) traj.push_back(traj.back());
  }
  return traj;
}

}  // namespace tsal
