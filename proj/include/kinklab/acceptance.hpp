#pragma once

#include <string>
#include <vector>

namespace kink {

struct AcceptanceOptions {
  int workers = 0;
  std::vector<int> only;  // empty: run all criteria
  bool quiet = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// runs the acceptance criteria, printing one pass/fail line each
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

}  // namespace kink
