#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mrm/harness.hpp"

namespace sim {

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Family-specific acceptance checks applied to the records of one run.
std::vector<CheckLine> assert_checks(const mrm::ExperimentSpec& spec,
                                     const std::vector<mrm::ExperimentRecord>& records);

/// Brute-force versus dynamic-programming suites; `cases` scales every suite.
std::vector<CheckLine> oracle_suites(std::uint64_t seed, std::uint32_t cases);

/// Writes one plan-dump line per trial of a continuous run.
void dump_plans(std::ostream& out, const mrm::ExperimentSpec& spec, std::uint32_t limit);

struct ReplayResult {
  bool reproduced = false;
  std::string summary;  // JSON
};

/// Re-plans the trial described by one plan-dump line and compares the
/// reward and the visited targets bit for bit. Optionally writes the
/// regenerated field as CSV.
ReplayResult replay(const std::string& dump_line, const std::string& field_csv_path);

}  // namespace sim
