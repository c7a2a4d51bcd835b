#include "tsal_cli/report.hpp"

#include <array>
#include <charconv>
#include <sstream>

namespace tsal::cli {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string record_header(Eigen::Index input_dim) {
  std::ostringstream out;
  out << "step,time,origin";
  for (Eigen::Index i = 0; i < input_dim; ++i) out << ",input_" << i;
  out << ",target,safety_value,was_safe,rmse_safe_area,acquisition_value";
  return out.str();
}

std::string record_row(const ExperimentRecord& r) {
  std::ostringstream out;
  out << r.step << ',' << format_double(r.time) << ',' << to_string(r.origin);
  for (Eigen::Index i = 0; i < r.input.size(); ++i) out << ',' << format_double(r.input[i]);
  out << ',' << format_double(r.target) << ',' << format_double(r.safety_value) << ',' << (r.was_safe ? 1 : 0)
      << ',' << format_optional(r.rmse_safe_area) << ',' << format_optional(r.acquisition_value);
  return out.str();
}

std::vector<SummaryRow> summarize(const std::string& acquisition, std::uint64_t seed,
                                  const std::vector<ExperimentRecord>& records, int budget, int checkpoints) {
  std::vector<const ExperimentRecord*> steps;
  for (const auto& r : records) {
    if (r.origin != RecordOrigin::Initial) steps.push_back(&r);
  }
  std::vector<SummaryRow> rows;
  int last = -1;
  for (int c = 1; c <= checkpoints; ++c) {
    const int step = (c * budget + checkpoints - 1) / checkpoints;
    if (step == last || step > static_cast<int>(steps.size())) continue;
    last = step;
    SummaryRow row{acquisition, seed, static_cast<int>(rows.size()) + 1, step, {}, {}, {}};
    double sum = 0.0;
    int count = 0;
    int chosen = 0;
    int safe = 0;
    for (int i = 0; i < step; ++i) {
      const auto& r = *steps[static_cast<std::size_t>(i)];
      if (r.rmse_safe_area) {
        row.rmse_safe_area = r.rmse_safe_area;
        sum += *r.rmse_safe_area;
        ++count;
      }
      if (r.origin == RecordOrigin::Acquisition) {
        ++chosen;
        safe += r.was_safe ? 1 : 0;
      }
    }
    if (count > 0) row.time_averaged_rmse = sum / count;
    if (chosen > 0) row.safe_percentage = 100.0 * safe / chosen;
    rows.push_back(row);
  }
  return rows;
}

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.acquisition << ',' << r.seed << ',' << r.checkpoint << ',' << r.step << ','
        << format_optional(r.rmse_safe_area) << ',' << format_optional(r.time_averaged_rmse) << ','
        << format_optional(r.safe_percentage) << '\n';
  }
}

}  // namespace tsal::cli
