#include "tsal/sal_engine.hpp"

#include "tsal/errors.hpp"
#include "tsal/sobol.hpp"

#include <cmath>
#include <random>

namespace tsal {

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Model-side view of a run: scaling between raw blocks and model blocks,
// context assembly, and RMSE evaluation.
class Session {
 public:
  Session(const SalConfig& cfg, const SystemUnderTest& system) : cfg_(cfg), sys_(system) {
    const Eigen::Index b = system.base_dim();
    offset_ = cfg.input_offset.size() == b ? cfg.input_offset : Vec::Zero(b);
    scale_ = cfg.input_scale.size() == b ? cfg.input_scale : Vec::Ones(b);
    if (!system.time_input()) {
      test_traj_ = random_safe_trajectory(system, cfg.nx_test_length, *cfg.step_semi_axes, cfg.seed ^ 0x5eedULL);
    }
  }

  [[nodiscard]] Vec to_model(const Vec& raw) const { return (raw - offset_).cwiseQuotient(scale_); }
  [[nodiscard]] Vec to_raw(const Vec& m) const { return offset_ + m.cwiseProduct(scale_); }

  [[nodiscard]] const Vec& scale() const { return scale_; }
  [[nodiscard]] Box model_box(const Box& raw) const { return Box{to_model(raw.lower), to_model(raw.upper)}; }

  /// Raw system input for block `k` of the trajectory at time t.
  [[nodiscard]] Vec system_input(double t, std::size_t k) const {
    if (sys_.time_input()) {
      Vec x(3);
      x << t, traj_[k];
      return x;
    }
    return nx_context(traj_, k, sys_.lag());
  }

  [[nodiscard]] Vec model_input(double t, std::size_t k) const {
    if (sys_.time_input()) {
      Vec x(3);
      x << t, to_model(traj_[k]);
      return x;
    }
    const int lag = sys_.lag();
    Vec out(sys_.model_dim());
    const Eigen::Index b = sys_.base_dim();
    for (int i = 0; i < lag; ++i) {
      const std::size_t idx = k >= static_cast<std::size_t>(i) ? k - static_cast<std::size_t>(i) : 0;
      out.segment(b * i, b) = to_model(traj_[idx]);
    }
    return out;
  }

  /// Previous L - 1 model blocks, most recent first, for a new block.
  [[nodiscard]] std::vector<Vec> history() const {
    std::vector<Vec> h;
    const int lag = sys_.lag();
    for (int i = 0; i < lag - 1; ++i) {
      const std::size_t size = traj_.size();
      const std::size_t idx = size > static_cast<std::size_t>(i) ? size - 1 - static_cast<std::size_t>(i) : 0;
      h.push_back(to_model(traj_[idx]));
    }
    return h;
  }

  [[nodiscard]] std::optional<double> rmse(const GpModel& model, double t) const {
    double sum = 0.0;
    std::size_t count = 0;
    if (sys_.time_input()) {
      for (const auto& gp : safe_area_test_grid(sys_, t, cfg_.rmse_resolution)) {
        Vec x(3);
        x << t, to_model(gp.input);
        const double e = model.posterior(x).mean - gp.target;
        sum += e * e;
        ++count;
      }
    } else {
      const Eigen::Index b = sys_.base_dim();
      for (std::size_t k = 0; k < test_traj_.size(); ++k) {
        const Vec raw = nx_context(test_traj_, k, sys_.lag());
        Vec x(raw.size());
        for (int i = 0; i < sys_.lag(); ++i) x.segment(b * i, b) = to_model(raw.segment(b * i, b));
        const double e = model.posterior(x).mean - sys_.evaluate(raw);
        sum += e * e;
        ++count;
      }
    }
    if (count == 0) return std::nullopt;
    return std::sqrt(sum / static_cast<double>(count));
  }

  std::vector<Vec> traj_;

 private:
  const SalConfig& cfg_;
  const SystemUnderTest& sys_;
  Vec offset_;
  Vec scale_;
  std::vector<Vec> test_traj_;
};

SeArdKernel prior_kernel(const HyperPriors& p) {
  Vec l(static_cast<Eigen::Index>(p.lengthscales.size()));
  for (std::size_t h = 0; h < p.lengthscales.size(); ++h)
    l[static_cast<Eigen::Index>(h)] = softplus(p.lengthscales[h].mean);
  return SeArdKernel(l, softplus(p.signal_std.mean), softplus(p.noise_std.mean));
}

}  // namespace

std::string to_string(AcquisitionKind kind) {
  switch (kind) {
    case AcquisitionKind::Entropy: return "entropy";
    case AcquisitionKind::Imspe: return "imspe";
    case AcquisitionKind::Timspe: return "timspe";
  }
  return "?";
}

AcquisitionKind parse_acquisition(const std::string& name) {
  if (name == "entropy") return AcquisitionKind::Entropy;
  if (name == "imspe") return AcquisitionKind::Imspe;
  if (name == "timspe") return AcquisitionKind::Timspe;
  throw InvalidArgument("unknown acquisition '" + name + "' (expected entropy, imspe or timspe)");
}

std::string to_string(RecordOrigin origin) {
  switch (origin) {
    case RecordOrigin::Initial: return "initial";
    case RecordOrigin::Acquisition: return "acquisition";
    case RecordOrigin::Fallback: return "fallback";
    case RecordOrigin::JumpBack: return "jump_back";
  }
  return "?";
}

void SalConfig::validate(const SystemUnderTest& system) const {
  if (budget < 0) throw InvalidArgument("SalConfig: budget must be >= 0");
  if (n_initial < 1) throw InvalidArgument("SalConfig: n_initial must be >= 1");
  if (retrain_steps < 0 || initial_train_steps < 0) throw InvalidArgument("SalConfig: negative training steps");
  domain.validate();
  initial_safe_region.validate();
  if (domain.dim() != system.base_dim()) throw InvalidArgument("SalConfig: domain dimension mismatch");
  if (!domain.contains(initial_safe_region.lower) || !domain.contains(initial_safe_region.upper))
    throw InvalidArgument("SalConfig: initial safe region must lie inside the domain");
  if (!system.time_input() && !step_semi_axes)
    throw InvalidArgument("SalConfig: NX systems need step_semi_axes");
  if (step_semi_axes && (step_semi_axes->size() != system.base_dim() || (step_semi_axes->array() <= 0).any()))
    throw InvalidArgument("SalConfig: step semi-axes must be positive, one per input");
  if (input_scale.size() != 0 && (input_scale.array() <= 0.0).any())
    throw InvalidArgument("SalConfig: input scales must be positive");
  if (!system.time_input() && acquisition == AcquisitionKind::Imspe)
    throw InvalidArgument("SalConfig: NX systems support the timspe and entropy acquisitions");
  if (time_window < 0.0) throw InvalidArgument("SalConfig: negative time window");
  if (rmse_every < 1) throw InvalidArgument("SalConfig: rmse_every must be >= 1");
  priors.validate(system.model_dim());
}

SalConfig default_config(const SystemUnderTest& system, AcquisitionKind kind, std::uint64_t seed) {
  SalConfig cfg;
  cfg.acquisition = kind;
  cfg.seed = seed;
  cfg.domain = system.domain();
  cfg.initial_safe_region = system.initial_safe_region();
  if (system.time_input()) {
    cfg.priors.lengthscales = {{5.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
    cfg.priors.signal_std = {1.0, 1.0};
    cfg.priors.noise_std = {-3.0, 1.0};
    cfg.priors.mean_constant = {10.0, 0.01};
  } else {
    const auto& p = std::get<system::NxSurrogate>(system.variant()).params;
    cfg.budget = 200;
    cfg.n_initial = 32;
    cfg.step_semi_axes = vec2(80.3, 2.17);
    cfg.input_offset = vec2(p.n_ref, p.v_ref);
    cfg.input_scale = vec2(p.n_scale, p.v_scale);
    cfg.priors = HyperPriors::shared(system.model_dim(), {0.5, 0.1}, {0.5, 0.1}, {-3.0, 0.1}, {11.77, 0.01});
    cfg.rmse_every = 10;
  }
  return cfg;
}

std::vector<Vec> initial_design(const SalConfig& cfg) {
  if (cfg.n_initial < 1) throw InvalidArgument("initial_design: n_initial must be >= 1");
  cfg.initial_safe_region.validate();
  const Box& r = cfg.initial_safe_region;
  const Eigen::MatrixXd unit = sobol_points(cfg.n_initial, static_cast<int>(r.dim()));
  std::vector<Vec> out;
  for (Eigen::Index i = 0; i < unit.rows(); ++i)
    out.push_back(r.lower + unit.row(i).transpose().cwiseProduct(r.upper - r.lower));
  return out;
}

std::vector<Vec> jump_back(const Box& safe_region, const Vec& semi_axes, const Vec& current) {
  safe_region.validate();
  if (semi_axes.size() != current.size() || current.size() != safe_region.dim())
    throw InvalidArgument("jump_back: dimension mismatch");
  const Vec target = safe_region.center();
  std::vector<Vec> out;
  Vec pos = current;
  const bool inside_at_start = safe_region.contains(pos, 1e-9);
  for (int guard = 0; guard < 100000; ++guard) {
    const Vec gap = (target - pos).cwiseQuotient(semi_axes);
    const double dist = gap.norm();
    if (dist > 1.0) {
      pos += (gap / dist).cwiseProduct(semi_axes);
    } else {
      pos = target;
    }
    out.push_back(pos);
    if (inside_at_start || safe_region.contains(pos, 1e-9)) break;
  }
  return out;
}

std::vector<ExperimentRecord> run(const SalConfig& cfg, const SystemUnderTest& system, const RecordSink& sink) {
  cfg.validate(system);
  Session session(cfg, system);
  std::vector<ExperimentRecord> records;
  std::seed_seq noise_seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          0x6e6f6973u};
  std::mt19937_64 noise_rng(noise_seq);
  std::normal_distribution<double> noise(0.0, 1.0);

  GpModel model(prior_kernel(cfg.priors), cfg.priors.mean_constant.mean);
  const bool time_input = system.time_input();

  // Measures block traj_[k] at time t, appends to the model and the log.
  auto measure = [&](double t, RecordOrigin origin, std::optional<double> acq_value) {
    const std::size_t k = session.traj_.size() - 1;
    const Vec sys_in = session.system_input(t, k);
    const double truth = system.evaluate(sys_in);
    const double y = truth + system.noise_std() * noise(noise_rng);
    model.add_point(session.model_input(t, k), y);
    ExperimentRecord rec;
    rec.step = static_cast<int>(records.size());
    rec.time = t;
    rec.input = session.traj_[k];
    rec.target = y;
    rec.safety_value = system.threshold() - truth;
    rec.was_safe = rec.safety_value >= 0.0;
    rec.origin = origin;
    rec.acquisition_value = acq_value;
    records.push_back(rec);
  };
  auto emit = [&] {
    if (sink) sink(records.back());
  };

  for (const Vec& x : initial_design(cfg)) {
    session.traj_.push_back(x);
    measure(static_cast<double>(records.size()), RecordOrigin::Initial, std::nullopt);
  }
  model = train_map(std::move(model), cfg.priors, cfg.initial_train_steps, true, cfg.learning_rate);
  // RMSE of the initial model is attached to the last initial record.
  records.back().rmse_safe_area = session.rmse(model, records.back().time);
  for (const auto& r : records) {
    if (sink) sink(r);
  }

  const Box model_domain = session.model_box(cfg.domain);
  std::optional<Vec> model_axes;
  if (cfg.step_semi_axes) model_axes = cfg.step_semi_axes->cwiseQuotient(session.scale());

  int used = 0;
  while (used < cfg.budget) {
    const double t = static_cast<double>(records.size());
    const Vec prev_model = session.to_model(session.traj_.back());

    AcquisitionSpec spec;
    if (time_input) {
      Vec prefix(1);
      prefix[0] = t;
      switch (cfg.acquisition) {
        case AcquisitionKind::Entropy: spec = acq::Entropy{prefix, Vec(0)}; break;
        case AcquisitionKind::Imspe:
        case AcquisitionKind::Timspe: {
          const FiniteMeasure time = cfg.acquisition == AcquisitionKind::Imspe
                                         ? FiniteMeasure::dirac(prefix)
                                         : (cfg.discrete_time_window
                                                ? discrete_time_window(t, static_cast<int>(cfg.time_window))
                                                : continuous_time_window(t, cfg.time_window));
          spec = acq::TimspeTimeInput{
              product_time_space(time, FiniteMeasure::uniform_box(model_domain.lower, model_domain.upper)), t};
          break;
        }
      }
    } else {
      const std::vector<Vec> hist = session.history();
      const FiniteMeasure space = FiniteMeasure::uniform_box(model_domain.lower, model_domain.upper);
      switch (cfg.acquisition) {
        case AcquisitionKind::Entropy: {
          Vec suffix(static_cast<Eigen::Index>(hist.size()) * system.base_dim());
          for (std::size_t i = 0; i < hist.size(); ++i)
            suffix.segment(static_cast<Eigen::Index>(i) * system.base_dim(), system.base_dim()) = hist[i];
          spec = acq::Entropy{Vec(0), suffix};
          break;
        }
        case AcquisitionKind::Imspe:  // rejected by validate()
        case AcquisitionKind::Timspe: spec = acq::TimspeNx{space, system.lag(), hist}; break;
      }
    }
    std::optional<Selection> sel;
    {
      const AcquisitionWorkspace ws = AcquisitionWorkspace::build(model, spec);
      SafetyConfig safety{model, system.threshold(), cfg.alpha, ConstraintForm::MeanPlusTwoSigma};
      StepConstraint step = step::None{};
      if (model_axes) step = step::EllipseAroundPrevious{*model_axes, prev_model};
      SelectOptions opt = cfg.select;
      opt.fallback = prev_model;
      const std::uint64_t step_seed = cfg.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(records.size());
      sel = select_next(ws, &safety, step, model_domain, step_seed, opt);
    }

    if (sel) {
      session.traj_.push_back(session.to_raw(sel->point));
      measure(t, RecordOrigin::Acquisition, sel->acquisition_value);
    } else {
      session.traj_.push_back(session.traj_.back());
      measure(t, RecordOrigin::Fallback, std::nullopt);
    }
    ++used;
    model = train_map(std::move(model), cfg.priors, cfg.retrain_steps, false, cfg.learning_rate);
    if (used % cfg.rmse_every == 0 || used == cfg.budget) records.back().rmse_safe_area = session.rmse(model, t);
    emit();

    if (!time_input && !records.back().was_safe) {
      for (const Vec& block : jump_back(cfg.initial_safe_region, *cfg.step_semi_axes, session.traj_.back())) {
        if (used >= cfg.budget) break;
        const double tj = static_cast<double>(records.size());
        session.traj_.push_back(block);
        measure(tj, RecordOrigin::JumpBack, std::nullopt);
        ++used;
        model = train_map(std::move(model), cfg.priors, cfg.retrain_steps, false, cfg.learning_rate);
        if (used % cfg.rmse_every == 0 || used == cfg.budget) records.back().rmse_safe_area = session.rmse(model, tj);
        emit();
      }
    }
  }
  return records;
}

std::optional<double> time_averaged_rmse(const std::vector<ExperimentRecord>& records) {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : records) {
    if (r.origin != RecordOrigin::Initial && r.rmse_safe_area) {
      sum += *r.rmse_safe_area;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

std::optional<double> safe_fraction(const std::vector<ExperimentRecord>& records) {
  int chosen = 0;
  int safe = 0;
  for (const auto& r : records) {
    if (r.origin == RecordOrigin::Acquisition) {
      ++chosen;
      if (r.was_safe) ++safe;
    }
  }
  if (chosen == 0) return std::nullopt;
  return static_cast<double>(safe) / chosen;
}

}  // namespace tsal
