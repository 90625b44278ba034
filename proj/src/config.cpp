#include "kinklab/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace kink {

namespace {

const std::vector<std::string> kKinds = {"instanton", "spectrum",  "sample-bridge",
                                         "sample-gibbs", "logz",   "rates",
                                         "interface", "spde",      "verify"};

const std::vector<std::string> kKnownKeys = {
    "kind",
    "potential", "potential.coeffs", "potential.cutoff_radius", "potential.blend_width",
    "epsilon", "gamma", "gamma1", "gamma2", "N", "kappa",
    "chain.rho", "chain.n_steps", "chain.burn_in", "chain.seed", "chain.adapt",
    "chain.target_acceptance", "chain.thin", "chain.p_reflect", "chain.p_translate",
    "chain.chains",
    "ladder.rungs", "ladder.power",
    "logz.epsilons",
    "rates.deltas", "rates.epsilons", "rates.norm",
    "bridge.samples", "bridge.refine_m", "bridge.dump_samples",
    "interface.epsilons", "interface.smear", "interface.cells", "interface.band",
    "interface.trim",
    "spde.nx", "spde.dt", "spde.t_end", "spde.noise", "spde.snapshot_stride",
    "spectrum.h", "spectrum.T",
    "instanton.tol", "instanton.table_size",
    "out_dir", "seed", "workers",
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0';
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> v)
    : std::runtime_error([&v] {
        std::ostringstream os;
        os << "invalid config:";
        for (const auto& s : v) os << "\n  " << s;
        return os.str();
      }()),
      violations(std::move(v)) {}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file: " + path});
  std::ostringstream os;
  os << in.rdbuf();
  return parse_text(os.str());
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> bad;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      bad.push_back("line " + std::to_string(line_no) + ": expected `key = value`");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (cfg.kv_.count(key))
      bad.push_back("duplicate key: " + key);
    else
      cfg.kv_[key] = val;
  }
  if (!bad.empty()) throw ConfigError(std::move(bad));
  cfg.validate();
  return cfg;
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream os;
  for (const auto& [k, v] : kv_) os << k << " = " << v << "\n";
  return os.str();
}

void ExperimentConfig::validate() {
  std::vector<std::string> bad;

  for (const auto& [k, v] : kv_) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), k) == kKnownKeys.end())
      bad.push_back("unknown key: " + k);
  }

  kind_ = str("kind", "");
  if (kind_.empty()) {
    bad.push_back("missing key: kind");
  } else if (std::find(kKinds.begin(), kKinds.end(), kind_) == kKinds.end()) {
    bad.push_back("unknown experiment kind: " + kind_);
  }

  const bool needs_potential =
      kind_ != "sample-bridge" && kind_ != "verify" && !kind_.empty();
  if (needs_potential && !has("potential") && !has("potential.coeffs"))
    bad.push_back("missing key: potential");

  // numeric sanity for every provided numeric key
  for (const auto& key :
       {"epsilon", "gamma", "gamma1", "gamma2", "kappa", "chain.rho", "chain.target_acceptance",
        "chain.p_reflect", "chain.p_translate", "ladder.power", "interface.smear", "interface.band",
        "interface.trim", "spde.dt", "spde.t_end", "spectrum.h", "spectrum.T",
        "instanton.tol", "potential.cutoff_radius", "potential.blend_width"}) {
    if (!has(key)) continue;
    double x;
    if (!parse_double(kv_.at(key), x)) bad.push_back(std::string("not a number: ") + key);
  }
  if (has("N") && kv_.at("N") != "auto") {
    double x;
    if (!parse_double(kv_.at("N"), x) || x < 1 || x != std::floor(x))
      bad.push_back("N: positive integer or `auto`");
  }

  // scale-parameter admissibility whenever the exponents are present
  if (has("epsilon") || has("gamma") || has("gamma1") || has("gamma2")) {
    ScaleParams p;
    p.epsilon = num("epsilon", 0.2);
    p.gamma = num("gamma", 0.3);
    p.gamma1 = num("gamma1", 0.1);
    p.gamma2 = num("gamma2", 0.5);
    p.N = 1;
    for (const auto& v : p.violations()) bad.push_back("violated: " + v);
  }

  if (has("chain.n_steps") || has("chain.burn_in")) {
    if (!(integer("chain.burn_in", 0) < integer("chain.n_steps", 1L << 40)))
      bad.push_back("violated: chain.burn_in < chain.n_steps");
  }
  if (has("chain.rho")) {
    const double r = num("chain.rho", 0.95);
    if (!(r > 0.0 && r < 1.0)) bad.push_back("violated: 0 < chain.rho < 1");
  }

  if (!bad.empty()) throw ConfigError(std::move(bad));
}

double ExperimentConfig::num(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  double x = fallback;
  parse_double(it->second, x);
  return x;
}

long ExperimentConfig::integer(const std::string& key, long fallback) const {
  return static_cast<long>(num(key, static_cast<double>(fallback)));
}

bool ExperimentConfig::flag(const std::string& key, bool fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  return it->second == "true" || it->second == "1" || it->second == "on" ||
         it->second == "yes";
}

std::string ExperimentConfig::str(const std::string& key, const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

std::vector<double> ExperimentConfig::list(const std::string& key) const {
  std::vector<double> out;
  auto it = kv_.find(key);
  if (it == kv_.end()) return out;
  std::istringstream in(it->second);
  double x;
  while (in >> x) out.push_back(x);
  return out;
}

PotentialSpec ExperimentConfig::potential() const {
  PotentialSpec spec;
  if (has("potential.coeffs"))
    spec = potential_from_coeffs(list("potential.coeffs"));
  else
    spec = lookup_potential(str("potential", "quartic"));
  if (has("potential.cutoff_radius"))
    spec = cutoff(spec, num("potential.cutoff_radius", 2.0), num("potential.blend_width", 1.0))
               .modified;
  return spec;
}

ScaleParams ExperimentConfig::scale_params(double epsilon_override) const {
  const double eps = epsilon_override > 0.0 ? epsilon_override : num("epsilon", 0.2);
  int N = 0;
  if (has("N") && kv_.at("N") != "auto") N = static_cast<int>(integer("N", 0));
  return make_params(eps, num("gamma", 0.3), num("gamma1", 0.1), num("gamma2", 0.5), N);
}

ChainConfig ExperimentConfig::chain() const {
  ChainConfig c;
  c.rho = num("chain.rho", c.rho);
  c.n_steps = integer("chain.n_steps", c.n_steps);
  c.burn_in = integer("chain.burn_in", c.burn_in);
  c.seed = static_cast<std::uint64_t>(integer("chain.seed", static_cast<long>(master_seed())));
  c.adapt = flag("chain.adapt", c.adapt);
  c.target_acceptance = num("chain.target_acceptance", c.target_acceptance);
  c.thin = static_cast<int>(integer("chain.thin", c.thin));
  c.p_reflect = num("chain.p_reflect", c.p_reflect);
  c.p_translate = num("chain.p_translate", c.p_translate);
  c.check();
  return c;
}

SPDEConfig ExperimentConfig::spde() const {
  SPDEConfig s;
  s.epsilon = num("epsilon", s.epsilon);
  s.gamma = num("gamma", s.gamma);
  s.n_x = static_cast<int>(integer("spde.nx", s.n_x));
  s.dt = num("spde.dt", 0.0);
  s.t_end = num("spde.t_end", s.t_end);
  s.seed = master_seed();
  s.noise_on = flag("spde.noise", true);
  s.snapshot_stride = static_cast<int>(integer("spde.snapshot_stride", 0));
  return s;
}

int ExperimentConfig::workers() const {
  const char* env = std::getenv("KINKLAB_WORKERS");
  if (env != nullptr) return std::max(1, std::atoi(env));
  return static_cast<int>(integer("workers", 0));
}

}  // namespace kink
