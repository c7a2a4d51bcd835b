#include "tsal/safe_optimizer.hpp"

#include "tsal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace tsal {

namespace {

constexpr double kTinyVariance = 1e-18;
constexpr double kArmijo = 1e-4;
constexpr double kInitialStep = 0.05;
constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Feasible region in box-normalized coordinates z = (x - lo) / (hi - lo).
class Region {
 public:
  Region(const Box& domain, const StepConstraint& step) : lo_(domain.lower), width_(domain.upper - domain.lower) {
    zlo_ = Vec::Zero(lo_.size());
    zhi_ = Vec::Ones(lo_.size());
    if (const auto* b = std::get_if<step::Box>(&step)) {
      if (b->lower.size() != lo_.size() || b->upper.size() != lo_.size())
        throw InvalidArgument("select_next: step box dimension mismatch");
      zlo_ = zlo_.cwiseMax(to_z(b->lower));
      zhi_ = zhi_.cwiseMin(to_z(b->upper));
      if ((zlo_.array() > zhi_.array()).any())
        throw InvalidArgument("select_next: step box does not meet the domain");
    } else if (const auto* e = std::get_if<step::EllipseAroundPrevious>(&step)) {
      if (e->semi_axes.size() != lo_.size() || e->previous.size() != lo_.size())
        throw InvalidArgument("select_next: ellipse dimension mismatch");
      if ((e->semi_axes.array() <= 0.0).any())
        throw InvalidArgument("select_next: ellipse semi-axes must be positive");
      center_ = to_z(e->previous);
      axes_ = e->semi_axes.array() / width_.array();
      zlo_ = zlo_.cwiseMax(*center_ - *axes_);
      zhi_ = zhi_.cwiseMin(*center_ + *axes_);
      if ((zlo_.array() > zhi_.array()).any())
        throw InvalidArgument("select_next: step ellipse does not meet the domain");
    }
  }

  [[nodiscard]] Vec to_z(const VecRef& x) const { return (x - lo_).cwiseQuotient(width_); }
  [[nodiscard]] Vec to_x(const VecRef& z) const { return lo_ + z.cwiseProduct(width_); }
  [[nodiscard]] const Vec& width() const { return width_; }

  [[nodiscard]] double ellipse_radius2(const VecRef& z) const {
    if (!center_) return 0.0;
    return ((z - *center_).array() / axes_->array()).square().sum();
  }

  [[nodiscard]] bool contains(const VecRef& z, double slack) const {
    if ((z.array() < zlo_.array() - slack).any() || (z.array() > zhi_.array() + slack).any()) return false;
    return !center_ || ellipse_radius2(z) <= 1.0 + slack;
  }

  // Clip to the bounding box, then pull radially into the ellipse.
  [[nodiscard]] Vec retract(const VecRef& z) const {
    Vec out = z.cwiseMax(zlo_).cwiseMin(zhi_);
    if (center_) {
      const double r2 = ellipse_radius2(out);
      if (r2 > 1.0) {
        out = *center_ + (out - *center_) / std::sqrt(r2);
        out = out.cwiseMax(zlo_).cwiseMin(zhi_);
      }
    }
    return out;
  }

  [[nodiscard]] Vec sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int tries = 0; tries < 10000; ++tries) {
      Vec z(zlo_.size());
      for (Eigen::Index h = 0; h < z.size(); ++h) z[h] = zlo_[h] + unit(rng) * (zhi_[h] - zlo_[h]);
      if (!center_ || ellipse_radius2(z) <= 1.0) return z;
    }
    return center_ ? retract(*center_) : Vec(0.5 * (zlo_ + zhi_));
  }

 private:
  Vec lo_;
  Vec width_;
  Vec zlo_;
  Vec zhi_;
  std::optional<Vec> center_;
  std::optional<Vec> axes_;
};

struct Problem {
  const AcquisitionWorkspace& ws;
  const SafetyConfig* safety;
  const Region& region;
  const SelectOptions& opt;
  double rho = 1.0;

  // Objective and safety margin at z, with gradients in z coordinates.
  bool eval(const Vec& z, double& obj, double& margin, Vec* d_obj, Vec* d_margin) const {
    const Vec x = region.to_x(z);
    const auto o = ws.objective(x, d_obj);
    if (!o || !std::isfinite(*o)) return false;
    obj = *o;
    margin = -kInf;
    if (safety) {
      Vec dm;
      margin = safety_margin(*safety, ws.embed(x), d_margin ? &dm : nullptr);
      if (d_margin) *d_margin = dm.segment(ws.candidate_offset(), ws.candidate_dim()).cwiseProduct(region.width());
    } else if (d_margin) {
      *d_margin = Vec::Zero(z.size());
    }
    if (d_obj) *d_obj = d_obj->cwiseProduct(region.width());
    return true;
  }

  [[nodiscard]] double penalized(double obj, double margin) const {
    return obj + rho * std::max(0.0, margin + opt.safety_margin);
  }

  [[nodiscard]] bool safe(double margin) const { return margin < 0.0; }
};

struct RunResult {
  Vec z;
  double objective;
};

std::optional<RunResult> descend(Problem& p, Vec z) {
  double obj = 0.0;
  double margin = 0.0;
  Vec d_obj;
  Vec d_margin;
  if (!p.eval(z, obj, margin, &d_obj, &d_margin)) return std::nullopt;

  std::optional<RunResult> best;
  if (p.safe(margin)) best = RunResult{z, obj};

  double eta = kInitialStep;
  for (int it = 0; it < p.opt.max_iterations; ++it) {
    Vec grad = d_obj;
    if (margin + p.opt.safety_margin > 0.0) grad += p.rho * d_margin;
    const double gnorm = grad.norm();
    if (!(gnorm > 0.0) || !std::isfinite(gnorm)) break;
    const Vec dir = grad / gnorm;
    const double f0 = p.penalized(obj, margin);

    bool accepted = false;
    while (eta >= p.opt.tolerance * 1e-2) {
      const Vec trial = p.region.retract(z - eta * dir);
      const Vec moved = z - trial;
      double t_obj = 0.0;
      double t_margin = 0.0;
      Vec t_dobj;
      Vec t_dmargin;
      if (moved.norm() > 0.0 && p.eval(trial, t_obj, t_margin, &t_dobj, &t_dmargin)) {
        const double f1 = p.penalized(t_obj, t_margin);
        if (f1 <= f0 - kArmijo * grad.dot(moved) && f1 < f0) {
          z = trial;
          obj = t_obj;
          margin = t_margin;
          d_obj = std::move(t_dobj);
          d_margin = std::move(t_dmargin);
          accepted = true;
          if (p.safe(margin) && (!best || obj < best->objective)) best = RunResult{z, obj};
          const bool small = moved.lpNorm<Eigen::Infinity>() < p.opt.tolerance * 1e-2;
          eta = std::min(2.0 * eta, 1.0);
          if (small) return best;
          break;
        }
      }
      eta *= 0.5;
    }
    if (!accepted) break;
  }
  return best;
}

}  // namespace

bool Box::contains(const VecRef& x, double slack) const {
  if (x.size() != lower.size()) return false;
  return (x.array() >= lower.array() - slack).all() && (x.array() <= upper.array() + slack).all();
}

void Box::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size()) throw InvalidArgument("Box: bad dimensions");
  if ((lower.array() >= upper.array()).any()) throw InvalidArgument("Box: lower must be < upper");
}

void SafetyConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("SafetyConfig: alpha must lie in (0, 1)");
  if (!safety_model.fitted()) throw StateError("SafetyConfig: safety model is not fitted");
}

double safety_probability(const SafetyConfig& cfg, const VecRef& x) {
  const Posterior p = cfg.safety_model.posterior(x);
  const double gap = cfg.threshold - p.mean;
  if (p.variance < kTinyVariance) return gap > 0.0 ? 1.0 : 0.0;
  return normal_cdf(gap / std::sqrt(p.variance));
}

double safety_margin(const SafetyConfig& cfg, const VecRef& x, Vec* gradient) {
  if (!gradient) {
    const Posterior p = cfg.safety_model.posterior(x);
    return p.mean + 2.0 * std::sqrt(std::max(p.variance, 0.0)) - cfg.threshold;
  }
  const PosteriorGradient p = cfg.safety_model.posterior_with_gradient(x);
  const double var = std::max(p.variance, 0.0);
  const double sd = std::sqrt(var);
  *gradient = p.d_mean;
  if (var > kTinyVariance) *gradient += p.d_variance / sd;
  return p.mean + 2.0 * sd - cfg.threshold;
}

bool is_feasible(const AcquisitionWorkspace& ws, const SafetyConfig* safety, const StepConstraint& step,
                 const Box& domain, const VecRef& x, double slack) {
  const Region region(domain, step);
  if (!region.contains(region.to_z(x), slack)) return false;
  return !safety || safety_margin(*safety, ws.embed(x)) < slack;
}

std::optional<Selection> select_next(const AcquisitionWorkspace& ws, const SafetyConfig* safety,
                                     const StepConstraint& step, const Box& domain, std::uint64_t seed,
                                     const SelectOptions& options) {
  domain.validate();
  if (domain.dim() != ws.candidate_dim()) throw InvalidArgument("select_next: domain dimension mismatch");
  if (options.starts < 1) throw InvalidArgument("select_next: need at least one start");
  if (safety) safety->validate();
  const Region region(domain, step);
  Problem problem{ws, safety, region, options};

  std::optional<Vec> fallback_z;
  if (options.fallback) {
    const Vec z = region.to_z(*options.fallback);
    double obj = 0.0;
    double margin = 0.0;
    if (region.contains(z, 1e-12) && problem.eval(z, obj, margin, nullptr, nullptr) &&
        margin < -options.safety_margin)
      fallback_z = z;
  }

  std::optional<RunResult> best;
  int best_run = -1;
  int planned = options.starts;
  int restarts = 0;
  for (int run = 0; run < planned; ++run) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(run)};
    std::mt19937_64 rng(seq);
    std::optional<Vec> start;
    for (int tries = 0; tries < options.max_rejections && !start; ++tries) {
      const Vec z = region.sample(rng);
      double obj = 0.0;
      double margin = 0.0;
      if (problem.eval(z, obj, margin, nullptr, nullptr) && margin < -options.safety_margin) start = z;
    }
    if (!start) start = fallback_z;

    std::optional<RunResult> result;
    if (start) {
      Vec d_obj;
      Vec d_margin;
      double obj = 0.0;
      double margin = 0.0;
      problem.eval(*start, obj, margin, &d_obj, &d_margin);
      const double dn = d_margin.norm();
      problem.rho = dn > 0.0 ? std::max(1.0, 10.0 * d_obj.norm() / dn) : 1.0;
      result = descend(problem, *start);
    }
    if (result && region.contains(result->z, 1e-8)) {
      if (!best || result->objective < best->objective) {
        best = result;
        best_run = run;
      }
    } else if (restarts < options.max_restarts) {
      ++restarts;
      ++planned;
    }
  }
  if (!best) return std::nullopt;

  Selection out;
  out.point = region.to_x(best->z);
  out.point = out.point.cwiseMax(domain.lower).cwiseMin(domain.upper);
  out.acquisition_value = ws.is_entropy() ? -best->objective : best->objective;
  out.run = best_run;
  return out;
}

}  // namespace tsal
