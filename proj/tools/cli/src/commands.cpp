#include "tsal_cli/commands.hpp"

#include "tsal/errors.hpp"
#include "tsal/safe_optimizer.hpp"
#include "tsal/sal_engine.hpp"
#include "tsal/validation.hpp"
#include "tsal_cli/config.hpp"
#include "tsal_cli/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace tsal::cli {

namespace {

struct Task {
  AcquisitionKind kind;
  std::uint64_t seed;
  std::vector<ExperimentRecord> records;
  std::string error;
};

void run_task(const ExperimentConfig& cfg, const std::filesystem::path& dir, Task& task) {
  const SystemUnderTest sys = cfg.make_system();
  const std::string name = to_string(task.kind) + "_seed" + std::to_string(task.seed) + ".csv";
  std::ofstream csv(dir / name);
  if (!csv) throw ResourceError("cannot write " + (dir / name).string());
  csv << record_header(sys.base_dim()) << '\n';
  const RecordSink sink = [&](const ExperimentRecord& r) {
    csv << record_row(r) << '\n';
    csv.flush();
  };
  task.records = run(cfg.run_config(task.kind, task.seed), sys, sink);
}

}  // namespace

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = parse_experiment(read_ini(opt.config_path));
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (opt.out_dir) cfg.output_dir = *opt.out_dir;
  const std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    err << "error: cannot create output directory " << dir << ": " << ec.message() << '\n';
    return kExitFailure;
  }

  std::vector<Task> tasks;
  for (const auto kind : cfg.acquisitions) {
    for (const auto seed : cfg.seeds) tasks.push_back({kind, seed, {}, {}});
  }
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        run_task(cfg, dir, tasks[i]);
      } catch (const std::exception& e) {
        tasks[i].error = e.what();
      }
      const std::lock_guard lock(log_mutex);
      out << to_string(tasks[i].kind) << " seed " << tasks[i].seed
          << (tasks[i].error.empty() ? " done" : " FAILED: " + tasks[i].error) << '\n';
    }
  };
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<SummaryRow> rows;
  bool failed = false;
  for (const auto& t : tasks) {
    failed = failed || !t.error.empty();
    if (!t.error.empty()) continue;
    const auto part = summarize(to_string(t.kind), t.seed, t.records, cfg.sal.budget, cfg.checkpoints);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  std::ofstream summary(dir / "summary.csv");
  write_summary(summary, rows);
  if (failed) {
    err << "error: at least one run aborted; partial outputs kept in " << dir << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_validate(const ValidateOptions& opt, std::ostream& out, std::ostream& err) {
  ValidationConfig vc;
  vc.samples = opt.samples;
  vc.seed = opt.seed;
  try {
    if (opt.config_path) {
      vc = parse_validation(read_ini(*opt.config_path));
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (vc.samples < 1) {
    err << "error: --samples must be >= 1\n";
    return kExitUsage;
  }
  const ValidationReport rep = run_validation_sweep(vc.samples, vc.seed, vc.max_dim);
  out << "samples: " << rep.samples << '\n'
      << "max relative error (cross_marginal): " << format_double(rep.max_rel_err_marginal) << '\n'
      << "max relative error (evaluate): " << format_double(rep.max_rel_err_evaluate) << '\n'
      << "max relative error: " << format_double(rep.max_rel_err()) << '\n'
      << "worst: " << rep.worst << '\n'
      << "seconds: " << rep.seconds << '\n';
  return rep.passed() ? kExitOk : kExitFailure;
}

std::vector<CurvePoint> imspe_curve(const AcquisitionWorkspace& ws, double lo, double hi, int count) {
  if (count < 2) throw InvalidArgument("imspe_curve: need at least two points");
  std::vector<CurvePoint> out;
  Vec x(1);
  for (int i = 0; i < count; ++i) {
    x[0] = lo + (hi - lo) * i / (count - 1);
    out.emplace_back(x[0], ws.try_evaluate(x));
  }
  return out;
}

MotivatingResult motivating_example(int curve_points) {
  Mat inputs(1, 1);
  inputs << 1.0;
  Vec targets(1);
  targets << 0.0;
  GpModel model(SeArdKernel(Vec::Ones(1), 1.0, 0.0), 0.0, inputs, targets);
  model.fit();
  const auto ws =
      AcquisitionWorkspace::build(model, acq::Imspe{FiniteMeasure::diag_gaussian(Vec::Zero(1), Vec::Ones(1))});
  const Box domain{Vec::Constant(1, -5.0), Vec::Constant(1, 5.0)};
  SelectOptions opt;
  opt.tolerance = 1e-10;
  const auto sel = select_next(ws, nullptr, step::None{}, domain, 0, opt);
  if (!sel) throw NumericalError("motivating example: optimizer found no point");
  return {sel->point[0], sel->acquisition_value, imspe_curve(ws, -5.0, 5.0, curve_points)};
}

int cmd_motivating(const std::optional<std::string>& out_path, std::ostream& out, std::ostream& err) {
  const MotivatingResult res = motivating_example();
  const double error = std::abs(res.minimizer - kMotivatingMinimizer);
  out << "minimizer," << format_double(res.minimizer) << '\n'
      << "value," << format_double(res.value) << '\n'
      << "reference," << format_double(kMotivatingMinimizer) << '\n'
      << "abs_error," << format_double(error) << '\n';
  std::ofstream file;
  if (out_path) {
    file.open(*out_path);
    if (!file) {
      err << "error: cannot write " << *out_path << '\n';
      return kExitFailure;
    }
  }
  std::ostream& curve = out_path ? static_cast<std::ostream&>(file) : out;
  curve << "x,imspe\n";
  for (const auto& [x, v] : res.curve) curve << format_double(x) << ',' << format_optional(v) << '\n';
  return error < 1e-4 ? kExitOk : kExitFailure;
}

}  // namespace tsal::cli
