#pragma once

#include "tsal/acquisition.hpp"
#include "tsal/gp.hpp"
#include "tsal/safe_optimizer.hpp"
#include "tsal/testbeds.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tsal {

enum class AcquisitionKind { Entropy, Imspe, Timspe };

std::string to_string(AcquisitionKind kind);
/// Accepts "entropy", "imspe", "timspe"; throws InvalidArgument otherwise.
AcquisitionKind parse_acquisition(const std::string& name);

/// Settings of one safe active-learning run.  Coordinates of `domain`,
/// `initial_safe_region` and `step_semi_axes` are raw system inputs.  NX
/// models are trained on (x - input_offset) / input_scale per block.
struct SalConfig {
  int budget = 40;
  int n_initial = 8;
  int retrain_steps = 30;
  int initial_train_steps = 300;
  double learning_rate = 0.05;

  AcquisitionKind acquisition = AcquisitionKind::Timspe;
  /// Time-input T-IMSPE: integrate over [t, t + window]; IMSPE uses a
  /// Dirac at the current time instead.
  double time_window = 10.0;
  bool discrete_time_window = false;

  Box domain;
  Box initial_safe_region;
  /// NX step constraint; empty for time-input systems.
  std::optional<Vec> step_semi_axes;
  Vec input_offset;
  Vec input_scale;

  double alpha = 0.977;
  SelectOptions select;

  HyperPriors priors;
  std::uint64_t seed = 0;

  /// RMSE evaluation: grid resolution for time-input systems, test
  /// trajectory length for NX systems; evaluate every `rmse_every` steps.
  int rmse_resolution = 41;
  int nx_test_length = 300;
  int rmse_every = 1;

  void validate(const SystemUnderTest& system) const;
};

/// Defaults for the shipped testbeds: domains, priors and constraints of the
/// standard experiments, with desk-scale budgets.
SalConfig default_config(const SystemUnderTest& system, AcquisitionKind kind, std::uint64_t seed);

enum class RecordOrigin { Initial, Acquisition, Fallback, JumpBack };
std::string to_string(RecordOrigin origin);

struct ExperimentRecord {
  int step = 0;
  double time = 0.0;
  Vec input;  // raw input block
  double target = 0.0;
  double safety_value = 0.0;  // threshold - noise-free output
  bool was_safe = true;
  RecordOrigin origin = RecordOrigin::Initial;
  std::optional<double> rmse_safe_area;
  std::optional<double> acquisition_value;
};

using RecordSink = std::function<void(const ExperimentRecord&)>;

/// First n_initial Sobol points scaled into the initial safe region.
std::vector<Vec> initial_design(const SalConfig& cfg);

/// Blocks leading from `current` towards the centre of `safe_region`, one
/// ellipse radius per step (in coordinates scaled by `semi_axes`), until a
/// block lies inside the region.  A start inside the region yields a
/// single step towards the centre.
std::vector<Vec> jump_back(const Box& safe_region, const Vec& semi_axes, const Vec& current);

/// Runs the loop and returns all records; each record is also passed to
/// `sink` as soon as it exists, so a failure leaves the partial log behind.
std::vector<ExperimentRecord> run(const SalConfig& cfg, const SystemUnderTest& system, const RecordSink& sink = {});

/// Mean of the available per-step RMSE values of acquisition-phase records.
std::optional<double> time_averaged_rmse(const std::vector<ExperimentRecord>& records);
/// Fraction of acquisition-chosen records that were safe (nullopt if none).
std::optional<double> safe_fraction(const std::vector<ExperimentRecord>& records);

}  // namespace tsal
