#pragma once

#include <string>
#include <vector>

namespace skewlab {

inline constexpr int kCriterionCount = 13;

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

/// Runs one acceptance criterion (1-based id).
CriterionResult run_criterion(int id);

/// Runs the listed criteria in order; an empty list runs all of them.
std::vector<CriterionResult> run_criteria(const std::vector<int>& ids = {});

/// "PASS  3 title: detail" without timing, suitable for files.
std::string format_criterion(const CriterionResult& r);

}  // namespace skewlab
