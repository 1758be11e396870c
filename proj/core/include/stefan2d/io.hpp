/// Diagnostics CSV, snapshot, and run-summary output.
///
/// Every number is written in full round-trip precision (scientific, 17
/// significant digits) with a locale-independent decimal point, so reruns of
/// the same configuration produce byte-identical files.
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "stefan2d/diagnostics.hpp"
#include "stefan2d/stefan.hpp"

namespace stefan2d {

std::string format_double(double x);

extern const char* const kDiagnosticsHeader;

std::string csv_line(const DiagnosticsRow& r);

// Streaming CSV writer: the header goes out on construction, one line per
// row() call, flushed so partial files survive a mid-run breakdown.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void row(const DiagnosticsRow& r);

 private:
  std::ofstream out_;
};

// Plain-text snapshot: header line "N_r N_theta t", then one block per field
// (a name line followed by the values, theta fastest): q, h, J.
void write_snapshot(const std::string& path, const StefanState& s);

struct Snapshot {
  int nr = 0;
  int nth = 0;
  double t = 0.0;
  std::vector<double> q;  // nr x nth, theta fastest
  std::vector<double> h;  // nth
  std::vector<double> jac;
};

Snapshot read_snapshot(const std::string& path);

// JSON run summary: config echo (including the derived b), termination,
// spectral constants, fitted decay rates, conservation and boundary-motion
// figures, and the audit verdicts with their margins.
void write_summary(const std::string& path, const RunResult& run);

}  // namespace stefan2d
