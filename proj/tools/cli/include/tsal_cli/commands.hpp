#pragma once

#include "tsal/acquisition.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace tsal::cli {

/// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct RunOptions {
  std::string config_path;
  int jobs = 1;
  std::optional<std::string> out_dir;  // overrides [output] directory
};

/// Runs every (acquisition, seed) pair of the config.  Writes
/// <out>/<acquisition>_seed<k>.csv per run and <out>/summary.csv.
int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err);

struct ValidateOptions {
  int samples = 1000;
  std::uint64_t seed = 0;
  std::optional<std::string> config_path;
};

int cmd_validate(const ValidateOptions& opt, std::ostream& out, std::ostream& err);

using CurvePoint = std::pair<double, std::optional<double>>;

/// `count` evenly spaced evaluate() samples on [lo, hi]; degenerate
/// candidates are absent.
std::vector<CurvePoint> imspe_curve(const AcquisitionWorkspace& ws, double lo, double hi, int count);

struct MotivatingResult {
  double minimizer = 0.0;
  double value = 0.0;
  std::vector<CurvePoint> curve;
};

inline constexpr double kMotivatingMinimizer = -0.5479204538;

/// SE kernel with unit lengthscale and signal, no noise, one datum at 1,
/// standard normal measure; minimizer of IMSPE over [-5, 5].
MotivatingResult motivating_example(int curve_points = 1001);

/// Prints the minimizer and the curve as CSV (to `out_path` if given).
int cmd_motivating(const std::optional<std::string>& out_path, std::ostream& out, std::ostream& err);

}  // namespace tsal::cli
