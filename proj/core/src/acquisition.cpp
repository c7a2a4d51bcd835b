#include "tsal/acquisition.hpp"

#include "tsal/errors.hpp"

#include <Eigen/Cholesky>

#include <sstream>

namespace tsal {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct Layout {
  Vec prefix;
  Vec suffix;
  std::optional<FiniteMeasure> measure;
};

Vec concat(const std::vector<Vec>& blocks) {
  Eigen::Index total = 0;
  for (const auto& b : blocks) total += b.size();
  Vec out(total);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.segment(at, b.size()) = b;
    at += b.size();
  }
  return out;
}

Layout layout_for(const AcquisitionSpec& spec) {
  return std::visit(
      Overloaded{
          [](const acq::Entropy& e) { return Layout{e.prefix, e.suffix, std::nullopt}; },
          [](const acq::Imspe& s) { return Layout{Vec(0), Vec(0), s.measure}; },
          [](const acq::TimspeTimeInput& s) {
            if (s.measure.time.dim() != 1)
              throw InvalidArgument("TimspeTimeInput: time measure must be one-dimensional");
            Vec prefix(1);
            prefix[0] = s.current_time;
            return Layout{prefix, Vec(0), s.measure.joint};
          },
          [](const acq::TimspeNx& s) {
            if (s.lag < 1) throw InvalidArgument("TimspeNx: lag must be >= 1");
            if (static_cast<int>(s.history.size()) != s.lag - 1)
              throw InvalidArgument("TimspeNx: history must hold lag - 1 blocks");
            for (const auto& h : s.history) {
              if (h.size() != s.space_measure.dim())
                throw InvalidArgument("TimspeNx: history block dimension mismatch");
            }
            return Layout{Vec(0), concat(s.history), FiniteMeasure::power(s.space_measure, s.lag)};
          },
      },
      spec);
}

}  // namespace

AcquisitionWorkspace::AcquisitionWorkspace(GpModel model, AcquisitionSpec spec)
    : model_(std::move(model)), spec_(std::move(spec)) {}

AcquisitionWorkspace AcquisitionWorkspace::build(const GpModel& model, AcquisitionSpec spec) {
  if (!model.fitted()) throw StateError("AcquisitionWorkspace: model is not fitted");
  Layout layout = layout_for(spec);
  AcquisitionWorkspace ws(model, std::move(spec));
  ws.prefix_ = std::move(layout.prefix);
  ws.suffix_ = std::move(layout.suffix);
  ws.candidate_dim_ = model.dim() - ws.prefix_.size() - ws.suffix_.size();
  if (ws.candidate_dim_ <= 0)
    throw InvalidArgument("AcquisitionWorkspace: context leaves no candidate coordinates");
  if (!layout.measure) return ws;

  if (layout.measure->dim() != model.dim()) {
    std::ostringstream msg;
    msg << "AcquisitionWorkspace: measure dimension " << layout.measure->dim()
        << " does not match model input dimension " << model.dim();
    throw InvalidArgument(msg.str());
  }
  ws.marginal_.emplace(model.kernel(), std::move(*layout.measure));
  ws.i1_ = model.kernel().signal_variance() * ws.marginal_->measure().mass();
  ws.data_marginal_ = data_marginal_matrix(*ws.marginal_, model.inputs());
  if (model.size() > 0) {
    const auto lower = model.chol_factor().triangularView<Eigen::Lower>();
    Mat x = lower.solve(ws.data_marginal_);
    lower.transpose().solveInPlace(x);
    ws.i2_ = x.trace();
  }
  return ws;
}

Vec AcquisitionWorkspace::embed(const VecRef& candidate) const {
  if (candidate.size() != candidate_dim_) {
    std::ostringstream msg;
    msg << "acquisition: candidate dimension " << candidate.size() << ", expected " << candidate_dim_;
    throw InvalidArgument(msg.str());
  }
  Vec full(model_.dim());
  full << prefix_, candidate, suffix_;
  return full;
}

const MarginalKernel& AcquisitionWorkspace::marginal() const {
  if (!marginal_) throw StateError("acquisition: entropy has no marginal kernel");
  return *marginal_;
}

double AcquisitionWorkspace::integrated(const VecRef& candidate, Vec* gradient) const {
  if (!marginal_) throw StateError("acquisition: evaluate() needs an integrated variant");
  const Vec x = embed(candidate);
  const SeArdKernel& k = model_.kernel();
  const double sf2 = k.signal_variance();
  const Eigen::Index n = model_.size();
  const Mat& inputs = model_.inputs();

  Mat dm;  // n x D, derivatives of m_* w.r.t. the full input
  const Vec m_star = cross_marginal_column(*marginal_, inputs, x, gradient ? &dm : nullptr);
  const double m_ss = single_marginal(*marginal_, x);

  double s = sf2 + model_.diagonal_shift();
  double q = m_ss;
  Vec k_star;
  Vec kappa;
  if (n > 0) {
    k_star = kernel_vector(k, inputs, x);
    kappa = model_.solve(k_star);
    s -= k_star.dot(kappa);
    q += kappa.dot(data_marginal_ * kappa) - 2.0 * kappa.dot(m_star);
  }
  if (!(s >= kDegenerateFloor * sf2)) {
    std::ostringstream msg;
    msg << "acquisition: degenerate candidate, Schur complement " << s;
    throw DegenerateCandidate(msg.str());
  }
  const double value = i1_ - i2_ - q / s;

  if (gradient) {
    const Eigen::Index off = prefix_.size();
    const Vec dm_ss = single_marginal_gradient(*marginal_, x);
    gradient->resize(candidate_dim_);
    Vec u;
    if (n > 0) u = model_.solve(data_marginal_ * kappa - m_star);
    for (Eigen::Index c = 0; c < candidate_dim_; ++c) {
      const Eigen::Index h = off + c;
      double ds = 0.0;
      double dq = dm_ss[h];
      if (n > 0) {
        const double inv_l2 = 1.0 / (k.lengthscales[h] * k.lengthscales[h]);
        const Vec dk = k_star.array() * (inputs.col(h).array() - x[h]) * inv_l2;
        ds = -2.0 * kappa.dot(dk);
        dq += 2.0 * u.dot(dk) - 2.0 * kappa.dot(dm.col(h));
      }
      (*gradient)[c] = -(dq * s - q * ds) / (s * s);
    }
  }
  return value;
}

double AcquisitionWorkspace::evaluate(const VecRef& candidate) const { return integrated(candidate, nullptr); }

Vec AcquisitionWorkspace::evaluate_gradient(const VecRef& candidate) const {
  Vec g;
  integrated(candidate, &g);
  return g;
}

double AcquisitionWorkspace::evaluate_with_gradient(const VecRef& candidate, Vec& gradient) const {
  return integrated(candidate, &gradient);
}

std::optional<double> AcquisitionWorkspace::try_evaluate(const VecRef& candidate) const {
  try {
    return integrated(candidate, nullptr);
  } catch (const DegenerateCandidate&) {
    return std::nullopt;
  }
}

double AcquisitionWorkspace::evaluate_entropy(const VecRef& candidate) const {
  return model_.posterior(embed(candidate)).variance;
}

double AcquisitionWorkspace::evaluate_entropy_with_gradient(const VecRef& candidate, Vec& gradient) const {
  const PosteriorGradient pg = model_.posterior_with_gradient(embed(candidate));
  gradient = pg.d_variance.segment(prefix_.size(), candidate_dim_);
  return pg.variance;
}

std::optional<double> AcquisitionWorkspace::objective(const VecRef& candidate, Vec* gradient) const {
  if (is_entropy()) {
    if (gradient) {
      const double v = evaluate_entropy_with_gradient(candidate, *gradient);
      *gradient = -*gradient;
      return -v;
    }
    return -evaluate_entropy(candidate);
  }
  try {
    return integrated(candidate, gradient);
  } catch (const DegenerateCandidate&) {
    return std::nullopt;
  }
}

}  // namespace tsal
