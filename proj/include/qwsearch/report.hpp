#pragma once

// Experiment reports: one row per asserted identity, CSV / JSON / text output.

#include <cstdint>
#include <string>
#include <vector>

namespace qws {

struct ReportRow {
  std::string instance;
  std::string operation;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;

  bool operator==(const ReportRow&) const = default;
};

/// |lhs - rhs| <= tolerance
ReportRow check_close(std::string instance, std::string operation, double lhs, double rhs, double tolerance,
                      std::uint64_t seed = 0);
/// lhs <= rhs + tolerance; residual = lhs - rhs
ReportRow check_at_most(std::string instance, std::string operation, double lhs, double rhs, double tolerance,
                        std::uint64_t seed = 0);
/// lhs >= rhs - tolerance; residual = rhs - lhs
ReportRow check_at_least(std::string instance, std::string operation, double lhs, double rhs, double tolerance,
                         std::uint64_t seed = 0);

struct ExperimentReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::string config;  // resolved configuration, as a JSON object text
  std::vector<ReportRow> rows;
  std::vector<std::string> errors;  // items that threw instead of producing rows

  bool passed() const;
  long failures() const;
};

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& text);

extern const char* const kReportColumns[9];

std::string report_csv(const ExperimentReport& report);
std::string report_json(const ExperimentReport& report);
std::string report_text(const ExperimentReport& report);

/// Rows back from report_csv / report_json output.
std::vector<ReportRow> parse_report_csv(const std::string& text);
ExperimentReport parse_report_json(const std::string& text);

void write_file(const std::string& path, const std::string& contents);

}  // namespace qws
