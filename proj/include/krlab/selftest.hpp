#pragma once

#include <string>
#include <vector>

namespace krlab {

struct SuiteResult {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  int checks = 0;
  bool passed = false;
  std::string detail;  // set when the suite threw
};

struct SelftestReport {
  std::vector<SuiteResult> suites;
  bool passed() const;
};

/// Fast invariant suites: closed forms against the pipeline, the Wick
/// expansion against its sampling oracle, and symmetries of the density.
SelftestReport run_selftest(unsigned seed = 7);

}  // namespace krlab
