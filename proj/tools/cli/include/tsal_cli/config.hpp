#pragma once

#include "tsal/sal_engine.hpp"
#include "tsal/testbeds.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsal::cli {

/// Parse failure carrying the offending line (0 when not tied to a line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& what);
  [[nodiscard]] int line() const { return line_; }

 private:
  int line_;
};

/// `key = value` entries grouped by `[section]`; `#` and `;` start comments.
struct IniDocument {
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string source;
  std::map<std::string, std::map<std::string, Entry>> sections;
};

IniDocument parse_ini(const std::string& text, const std::string& source);
IniDocument read_ini(const std::string& path);

struct ExperimentConfig {
  std::string system = "seasonal";
  double strength = 5.0;
  double noise_std = 0.01;

  std::vector<AcquisitionKind> acquisitions{AcquisitionKind::Timspe, AcquisitionKind::Entropy};
  std::vector<std::uint64_t> seeds;
  /// Template for every run; acquisition and seed are filled in per run.
  SalConfig sal;
  int checkpoints = 10;
  std::string output_dir = "out";

  [[nodiscard]] SystemUnderTest make_system() const;
  [[nodiscard]] SalConfig run_config(AcquisitionKind kind, std::uint64_t seed) const;
};

/// Sections [testbed], [sal], [evaluation], [output].  Unknown sections or
/// keys, malformed values and a missing seed list raise ConfigError.
ExperimentConfig parse_experiment(const IniDocument& doc);

struct ValidationConfig {
  std::string kernel = "se_ard";
  std::string measure = "uniform_box";
  int samples = 1000;
  std::uint64_t seed = 0;
  int max_dim = 4;
};

/// Section [validation]; throws UnsupportedError for pairings without a
/// shipped closed form.
ValidationConfig parse_validation(const IniDocument& doc);

}  // namespace tsal::cli
