#include <iostream>

#include "skewlab/verify.hpp"

int main() {
  int failed = 0;
  for (int id = 1; id <= skewlab::kCriterionCount; ++id) {
    const auto r = skewlab::run_criterion(id);
    std::cout << skewlab::format_criterion(r) << "  [" << static_cast<long>(r.seconds * 1000) << " ms]" << std::endl;
    failed += !r.passed;
  }
  std::cout << (skewlab::kCriterionCount - failed) << "/" << skewlab::kCriterionCount << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
