#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "scclab/config.hpp"

namespace scclab {

struct CriterionResult {
  int id = 0;  // 1..12 acceptance criteria, 0 for auxiliary checks
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ResultRecord {
  std::string experiment;
  std::string config_hash;
  std::string timestamp;
  std::map<std::string, std::string> config;  // effective config including seed and workers
  std::uint64_t seed = 0;
  int workers = 1;
  std::map<std::string, double> metrics;
  std::map<std::string, std::vector<double>> series;
  std::map<std::string, double> timings;  // seconds, excluded from determinism checks
  std::vector<CriterionResult> criteria;
  std::vector<std::string> warnings;

  bool pass() const;
  std::string to_json_line() const;
  static ResultRecord from_json_line(const std::string& line);
};

struct RunContext {
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_dir;  // optional side outputs (CSV, trajectory logs)
};

const std::vector<std::string>& experiment_names();
bool is_experiment(const std::string& name);
std::string criterion_name(int id);

// Throws ConfigError on an unknown experiment or invalid config.
ResultRecord run_experiment(const std::string& name, const Config& cfg, const RunContext& ctx);

std::vector<ResultRecord> read_results(std::istream& is);
void append_result(const std::string& path, const ResultRecord& r);

struct ReportLine {
  int id = 0;
  std::string name;
  std::string status;  // PASS, FAIL, NOT RUN, INCONSISTENT
  std::string experiment;
  std::string detail;
};

struct Report {
  std::vector<ReportLine> criteria;
  std::vector<ReportLine> cross_checks;
  std::vector<std::string> inconsistent;  // experiments whose config hash does not match
  std::vector<std::string> gaps;
  bool all_pass() const;  // every executed criterion and cross check passes
  void write_markdown(std::ostream& os) const;
  // Plot data: experiment, series, index, value.
  static void write_series_csv(std::ostream& os, const std::vector<ResultRecord>& records);
};

Report make_report(const std::vector<ResultRecord>& records);

}  // namespace scclab
