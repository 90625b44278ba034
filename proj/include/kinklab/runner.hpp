#pragma once

#include <string>

#include "kinklab/config.hpp"

namespace kink {

struct RunResult {
  int exit_code = 0;  // 0 ok, 2 config error, 3 numeric failure, 4 acceptance failure
  std::string manifest_path;
  std::string message;
};

// dispatches the experiment kind, writes outputs atomically, emits the
// manifest last; failures keep partial outputs with a FAILED marker
RunResult run_experiment(const ExperimentConfig& cfg);

}  // namespace kink
