#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kinklab/acceptance.hpp"
#include "kinklab/config.hpp"
#include "kinklab/runner.hpp"

namespace {

struct Cli {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_common(CLI::App* cmd, Cli& cli) {
  cmd->add_option("--config", cli.config_path, "config file (key = value lines)");
  auto bind = [cmd, &cli](const std::string& flag, const std::string& key,
                          const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&cli, key](const std::string& v) { cli.overrides[key] = v; }, help);
  };
  bind("--out", "out_dir", "output directory");
  bind("--seed", "seed", "master seed");
  bind("--workers", "workers", "worker count (0: hardware)");
  bind("--potential", "potential", "potential name (quartic)");
  bind("--epsilon", "epsilon", "epsilon");
  bind("--gamma", "gamma", "gamma");
  bind("--gamma1", "gamma1", "gamma1");
  bind("--gamma2", "gamma2", "gamma2");
  bind("--n", "N", "grid half-count N (or auto)");
}

int run_kind(const std::string& kind, const Cli& cli) {
  std::ostringstream text;
  if (!cli.config_path.empty()) {
    std::ifstream in(cli.config_path);
    if (!in) {
      std::fprintf(stderr, "cannot open config: %s\n", cli.config_path.c_str());
      return 2;
    }
    text << in.rdbuf() << "\n";
  }
  // subcommand name and command-line flags override the file
  std::map<std::string, std::string> kv = cli.overrides;
  kv["kind"] = kind;
  for (const auto& [k, v] : kv) text << k << " = " << v << "\n";

  try {
    // later duplicates win: rebuild through a map before the final parse
    std::istringstream pre(text.str());
    std::map<std::string, std::string> merged;
    std::string line;
    while (std::getline(pre, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return std::string{};
        const auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
      };
      merged[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    std::ostringstream canonical;
    for (const auto& [k, v] : merged) canonical << k << " = " << v << "\n";

    const auto cfg = kink::ExperimentConfig::parse_text(canonical.str());
    const auto result = kink::run_experiment(cfg);
    if (!result.message.empty()) std::fprintf(stderr, "%s\n", result.message.c_str());
    std::fprintf(stderr, "manifest: %s\n", result.manifest_path.c_str());
    return result.exit_code;
  } catch (const kink::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for the invariant measure of the stochastic "
               "Allen-Cahn equation"};
  app.require_subcommand(1);
  Cli cli;

  struct Sub {
    const char* kind;
    const char* help;
    std::vector<std::pair<const char*, const char*>> flags;  // flag -> config key
  };
  const std::vector<Sub> subs = {
      {"instanton", "solve the standing-wave profile and emit its table",
       {{"--tol", "instanton.tol"}, {"--table-size", "instanton.table_size"}}},
      {"spectrum", "eigenvalues of the linearized operator at the kink",
       {{"--h", "spectrum.h"}, {"--t-box", "spectrum.T"}}},
      {"sample-bridge", "exact reference-bridge sampling and tail diagnostics",
       {{"--samples", "bridge.samples"},
        {"--refine-m", "bridge.refine_m"},
        {"--dump-samples", "bridge.dump_samples"}}},
      {"sample-gibbs", "Markov chain for the Gibbs measure",
       {{"--steps", "chain.n_steps"},
        {"--burn-in", "chain.burn_in"},
        {"--thin", "chain.thin"},
        {"--rho", "chain.rho"}}},
      {"logz", "stepping-stone normalization-constant estimate",
       {{"--rungs", "ladder.rungs"},
        {"--power", "ladder.power"},
        {"--epsilons", "logz.epsilons"},
        {"--steps", "chain.n_steps"},
        {"--burn-in", "chain.burn_in"}}},
      {"rates", "concentration exceedance curves over an epsilon ladder",
       {{"--deltas", "rates.deltas"},
        {"--epsilons", "rates.epsilons"},
        {"--norm", "rates.norm"},
        {"--chains", "chain.chains"},
        {"--steps", "chain.n_steps"}}},
      {"interface", "interface-position statistics in the original scaling",
       {{"--epsilons", "interface.epsilons"},
        {"--cells", "interface.cells"},
        {"--band", "interface.band"},
        {"--trim", "interface.trim"},
        {"--smear", "interface.smear"},
        {"--chains", "chain.chains"},
        {"--steps", "chain.n_steps"}}},
      {"spde", "semi-implicit integration of the stochastic Allen-Cahn equation",
       {{"--nx", "spde.nx"},
        {"--dt", "spde.dt"},
        {"--t-end", "spde.t_end"},
        {"--noise", "spde.noise"},
        {"--snapshot-stride", "spde.snapshot_stride"}}},
      {"verify", "run the acceptance suite (exit 4 on failure)", {}},
  };

  for (const auto& sub : subs) {
    CLI::App* cmd = app.add_subcommand(sub.kind, sub.help);
    add_common(cmd, cli);
    for (const auto& [flag, key] : sub.flags) {
      const std::string key_copy = key;
      cmd->add_option_function<std::string>(
          flag, [&cli, key_copy](const std::string& v) { cli.overrides[key_copy] = v; }, "");
    }
    cmd->callback([kind = std::string(sub.kind), &cli] { std::exit(run_kind(kind, cli)); });
  }

  CLI11_PARSE(app, argc, argv);
  return 0;
}
