#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinklab/gibbs.hpp"
#include "kinklab/grid.hpp"
#include "kinklab/potential.hpp"
#include "kinklab/spde.hpp"

namespace kink {

// carries every violation found, not just the first
struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> v);
  std::vector<std::string> violations;
};

// Line-oriented `key = value` file with dotted sections and '#' comments.
class ExperimentConfig {
 public:
  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse_text(const std::string& text);

  std::string serialize() const;  // canonical key order; reparses to an equal config

  const std::string& kind() const { return kind_; }
  const std::map<std::string, std::string>& raw() const { return kv_; }

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  double num(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  std::vector<double> list(const std::string& key) const;

  PotentialSpec potential() const;  // resolves name/coeffs, applies any cutoff
  ScaleParams scale_params(double epsilon_override = 0.0) const;
  ChainConfig chain() const;
  SPDEConfig spde() const;

  std::string out_dir() const { return str("out_dir", "out"); }
  std::uint64_t master_seed() const { return static_cast<std::uint64_t>(integer("seed", 1)); }
  int workers() const;

 private:
  void validate();
  std::map<std::string, std::string> kv_;
  std::string kind_;
};

}  // namespace kink
