#pragma once

#include <string>
#include <vector>

namespace brq::acceptance {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
  bool informational = false;  ///< reported but not part of the verdict
};

struct CriterionReport {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
  bool passed() const;
};

inline constexpr int kCriterionCount = 14;

std::string criterion_title(int id);
/// Runs one criterion; exceptions become failed checks.
CriterionReport run_criterion(int id);

/// Criterion ids for a suite name: all, special, oracle, approx, kernels,
/// localization, or a comma list of ids. Throws Error{InvalidArgument}.
std::vector<int> suite(const std::string& name);

/// One summary line per criterion ("PASS [3] title (1.2 s)") plus indented checks.
std::string format_report(const CriterionReport& report, bool with_checks);

}  // namespace brq::acceptance
