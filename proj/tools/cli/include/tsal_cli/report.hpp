#pragma once

#include "tsal/sal_engine.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace tsal::cli {

/// Shortest representation that round-trips to the same double.
std::string format_double(double v);
/// Empty string for an absent value.
std::string format_optional(const std::optional<double>& v);

/// Column order of the per-run CSV:
///   step,time,origin,input_0,...,input_{d-1},target,safety_value,was_safe,
///   rmse_safe_area,acquisition_value
std::string record_header(Eigen::Index input_dim);
std::string record_row(const ExperimentRecord& r);

struct SummaryRow {
  std::string acquisition;
  std::uint64_t seed = 0;
  int checkpoint = 0;
  int step = 0;  // acquisition steps completed
  std::optional<double> rmse_safe_area;
  std::optional<double> time_averaged_rmse;
  std::optional<double> safe_percentage;
};

inline constexpr const char* kSummaryHeader =
    "acquisition,seed,checkpoint,step,rmse_safe_area,time_averaged_rmse,safe_percentage";

/// Rows at `checkpoints` evenly spaced points of the budget (duplicates
/// dropped).  The RMSE is the latest value available at the checkpoint.
std::vector<SummaryRow> summarize(const std::string& acquisition, std::uint64_t seed,
                                  const std::vector<ExperimentRecord>& records, int budget, int checkpoints);

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace tsal::cli
