#include "qwsearch/report.hpp"

#include "qwsearch/core.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qws {

namespace {

using nlohmann::json;

ReportRow make_row(std::string instance, std::string operation, double lhs, double rhs, double residual,
                   double tolerance, std::uint64_t seed) {
  ReportRow r;
  r.instance = std::move(instance);
  r.operation = std::move(operation);
  r.lhs = lhs;
  r.rhs = rhs;
  r.residual = residual;
  r.tolerance = tolerance;
  r.pass = std::isfinite(residual) && residual <= tolerance;
  r.seed = seed;
  return r;
}

json number(double x) { return std::isfinite(x) ? json(x) : json(format_double(x)); }

double from_json_number(const json& j) { return j.is_string() ? parse_double(j.get<std::string>()) : j.get<double>(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

const char* const kReportColumns[9] = {"instance", "operation", "lhs",  "rhs",    "residual",
                                       "tolerance", "verdict",  "seed", "wall_ms"};

ReportRow check_close(std::string instance, std::string operation, double lhs, double rhs, double tolerance,
                      std::uint64_t seed) {
  return make_row(std::move(instance), std::move(operation), lhs, rhs, std::abs(lhs - rhs), tolerance, seed);
}

ReportRow check_at_most(std::string instance, std::string operation, double lhs, double rhs, double tolerance,
                        std::uint64_t seed) {
  return make_row(std::move(instance), std::move(operation), lhs, rhs, lhs - rhs, tolerance, seed);
}

ReportRow check_at_least(std::string instance, std::string operation, double lhs, double rhs, double tolerance,
                         std::uint64_t seed) {
  return make_row(std::move(instance), std::move(operation), lhs, rhs, rhs - lhs, tolerance, seed);
}

bool ExperimentReport::passed() const { return failures() == 0; }

long ExperimentReport::failures() const {
  long bad = static_cast<long>(errors.size());
  for (const ReportRow& r : rows) bad += r.pass ? 0 : 1;
  return bad;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double x = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && text[0] == '+') ++first;
  const auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc() || res.ptr != last) throw ValidationError("parse_double: bad number \"" + text + "\"");
  return x;
}

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream out;
  for (int i = 0; i < 9; ++i) out << (i ? "," : "") << kReportColumns[i];
  out << "\n";
  for (const ReportRow& r : report.rows) {
    out << csv_field(r.instance) << ',' << csv_field(r.operation) << ',' << format_double(r.lhs) << ','
        << format_double(r.rhs) << ',' << format_double(r.residual) << ',' << format_double(r.tolerance) << ','
        << (r.pass ? "pass" : "fail") << ',' << r.seed << ',' << format_double(r.wall_ms) << "\n";
  }
  return out.str();
}

std::string report_json(const ExperimentReport& report) {
  json doc = json::object();
  doc["suite"] = report.suite;
  doc["seed"] = report.seed;
  doc["config"] = report.config.empty() ? json::object() : json::parse(report.config);
  json rows = json::array();
  for (const ReportRow& r : report.rows) {
    json row = json::object();
    row["instance"] = r.instance;
    row["operation"] = r.operation;
    row["lhs"] = number(r.lhs);
    row["rhs"] = number(r.rhs);
    row["residual"] = number(r.residual);
    row["tolerance"] = number(r.tolerance);
    row["verdict"] = r.pass ? "pass" : "fail";
    row["seed"] = r.seed;
    row["wall_ms"] = number(r.wall_ms);
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  doc["errors"] = report.errors;
  doc["failures"] = report.failures();
  doc["passed"] = report.passed();
  return doc.dump(2) + "\n";
}

std::string report_text(const ExperimentReport& report) {
  std::ostringstream out;
  for (const ReportRow& r : report.rows) {
    out << (r.pass ? "PASS " : "FAIL ") << std::left << std::setw(16) << r.instance << ' ' << std::setw(40)
        << r.operation << " lhs=" << format_double(r.lhs) << " rhs=" << format_double(r.rhs)
        << " residual=" << format_double(r.residual) << " tol=" << format_double(r.tolerance) << "\n";
  }
  for (const std::string& e : report.errors) out << "ERROR " << e << "\n";
  out << report.suite << ": " << report.rows.size() << " checks, " << report.failures() << " failures\n";
  return out.str();
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw ValidationError("parse_report_csv: expected 9 fields in \"" + line + "\"");
    ReportRow r;
    r.instance = f[0];
    r.operation = f[1];
    r.lhs = parse_double(f[2]);
    r.rhs = parse_double(f[3]);
    r.residual = parse_double(f[4]);
    r.tolerance = parse_double(f[5]);
    r.pass = f[6] == "pass";
    r.seed = std::stoull(f[7]);
    r.wall_ms = parse_double(f[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

ExperimentReport parse_report_json(const std::string& text) {
  const json doc = json::parse(text);
  ExperimentReport report;
  report.suite = doc.at("suite").get<std::string>();
  report.seed = doc.at("seed").get<std::uint64_t>();
  report.config = doc.at("config").dump();
  for (const json& row : doc.at("rows")) {
    ReportRow r;
    r.instance = row.at("instance").get<std::string>();
    r.operation = row.at("operation").get<std::string>();
    r.lhs = from_json_number(row.at("lhs"));
    r.rhs = from_json_number(row.at("rhs"));
    r.residual = from_json_number(row.at("residual"));
    r.tolerance = from_json_number(row.at("tolerance"));
    r.pass = row.at("verdict").get<std::string>() == "pass";
    r.seed = row.at("seed").get<std::uint64_t>();
    r.wall_ms = from_json_number(row.at("wall_ms"));
    report.rows.push_back(std::move(r));
  }
  report.errors = doc.at("errors").get<std::vector<std::string>>();
  return report;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path + ": cannot write");
  out << contents;
}

}  // namespace qws
