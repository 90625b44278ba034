// Acceptance gate: runs every criterion at its stated tolerance and prints
// one pass/fail line each. Exit code 0 iff all pass.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "kinklab/acceptance.hpp"

int main(int argc, char** argv) {
  kink::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) {
      opts.workers = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      const std::string arg = argv[++i];
      std::size_t pos = 0;
      while (pos < arg.size()) {
        opts.only.push_back(std::atoi(arg.c_str() + pos));
        const auto comma = arg.find(',', pos);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    } else {
      std::fprintf(stderr, "usage: %s [--workers N] [--only 1,2,...]\n", argv[0]);
      return 2;
    }
  }
  const auto results = kink::run_acceptance(opts);
  bool all = !results.empty();
  for (const auto& r : results) all = all && r.pass;
  std::printf("%s: %zu criteria\n", all ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              results.size());
  return all ? 0 : 1;
}
