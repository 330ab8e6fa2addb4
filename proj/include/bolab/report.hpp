#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace bolab {

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct Verdict {
  std::string criterion;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report {
  std::string experiment_id;
  nlohmann::json params;
  std::vector<Table> tables;
  std::vector<std::pair<std::string, Fit>> fits;
  std::vector<Verdict> verdicts;
  double runtime_seconds = 0.0;

  bool all_passed() const;
  const Table* table(const std::string& name) const;
  /// Deterministic body (runtime and timestamps excluded).
  nlohmann::json body_json() const;
};

Fit fit_linear(const std::vector<double>& x, const std::vector<double>& y);
Fit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

uint64_t fnv1a(const std::string& text);
std::string config_hash(const nlohmann::json& params);

struct EmittedPaths {
  std::string report_json;
  std::string meta_json;
  std::vector<std::string> csv_files;
  std::string plot_script;
};

/// Writes report.json (deterministic body), meta.json (runtime), one CSV per
/// table, and a gnuplot script referencing the CSVs.
EmittedPaths emit_report(const Report& report, const std::string& dir);

}  // namespace bolab
