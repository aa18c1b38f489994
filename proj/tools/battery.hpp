#pragma once

#include <functional>
#include <string>
#include <vector>

namespace autoexplore::cli {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Check {
  int id;
  std::string name;
  std::function<CheckResult()> run;
};

/// The numbered property checks, in order.
const std::vector<Check>& battery();

/// Run the checks whose ids are listed (all when empty). A check that throws
/// is reported as failed with the exception text.
std::vector<CheckResult> run_battery(const std::vector<int>& ids = {});

}  // namespace autoexplore::cli
