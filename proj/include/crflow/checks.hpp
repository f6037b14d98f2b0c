#pragma once

#include <string>
#include <vector>

namespace crflow {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};
using CheckList = std::vector<CheckResult>;

/// Unit-level identity and formula checks (< 1 min).
void run_quick_checks(CheckList& out);
/// Quick checks plus refinement studies and oracle comparisons.
void run_full_checks(CheckList& out);

}  // namespace crflow
