#pragma once

#include <string>
#include <vector>

namespace hexband {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the eight acceptance criteria at their pinned tolerances and returns
// one result per criterion, in order.
std::vector<CriterionResult> run_acceptance(int threads);

}  // namespace hexband
