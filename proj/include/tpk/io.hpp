#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tpk/curve.hpp"
#include "tpk/flow.hpp"

namespace tpk {

/// {"dim": d, "samples": [[...], ...], "derivative_rule": "spectral"}; the rule is optional
/// and defaults to spectral. Throws DomainError on malformed input.
std::string curve_to_json(const ClosedCurve& curve);
ClosedCurve curve_from_json(const std::string& text);
void write_curve(const ClosedCurve& curve, const std::string& path);
ClosedCurve read_curve(const std::string& path);

/// Header iter,energy,length,grad_norm,lambda,min_dist,bilip,step; 17 significant digits.
std::string trace_to_csv(const std::vector<TraceRow>& rows);
std::vector<TraceRow> trace_from_csv(const std::string& text);

/// Simple CSV table: header row plus numeric rows written with 17 significant digits.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
std::string table_to_csv(const Table& table);
Table table_from_csv(const std::string& text);

std::string format_double(double v);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// Parsed command line in a form that round-trips through JSON text.
struct RunConfig {
  std::string command;
  double p = 4.5;
  double q = 2.0;
  int nodes = 0;
  std::uint64_t seed = 7;
  std::string out;
  int threads = 0;
  /// command-specific flags, stored by long name
  std::vector<std::pair<std::string, std::string>> options;

  std::string to_text() const;
  static RunConfig from_text(const std::string& text);
  bool operator==(const RunConfig&) const = default;
};

}  // namespace tpk
