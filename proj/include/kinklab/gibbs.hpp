#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kinklab/energy.hpp"
#include "kinklab/gaussian.hpp"
#include "kinklab/grid.hpp"
#include "kinklab/instanton.hpp"
#include "kinklab/potential.hpp"
#include "kinklab/rng.hpp"

namespace kink {

// mu^{N,eps} = Z^-1 exp(-Phi) nu^{N,eps} with Phi = eps^-1 int F(u)
struct GibbsSpec {
  BridgeSpec bridge;
  PotentialSpec potential;
  int quad_order = 8;
};

struct ChainConfig {
  double rho = 0.95;                // autoregressive coefficient of the proposal
  long n_steps = 100000;
  long burn_in = 10000;
  std::uint64_t seed = 1;
  bool adapt = true;
  double target_acceptance = 0.25;
  int thin = 10;
  double p_reflect = 0.05;          // probability of the u(s) -> -u(-s) move
  double p_translate = 0.0;         // probability of a one-cell shift move

  void check() const;
};

struct GibbsReport {
  double acceptance_rate = 0.0;
  double translate_rate = 0.0;
  double rho_final = 0.0;
  long kept = 0;
  int thin = 1;
  double ess_phi = 0.0;
  double ess_xi = 0.0;
  double mean_energy = 0.0, se_energy = 0.0;
  double mean_phi = 0.0, se_phi = 0.0;
  double mean_dist_l2 = 0.0, se_dist_l2 = 0.0;
  double mean_dist_linf = 0.0, se_dist_linf = 0.0;
  double mean_xi = 0.0, se_xi = 0.0;
};

struct ChainResult {
  GibbsReport report;
  std::vector<double> phi;        // thinned traces
  std::vector<double> energy;
  std::vector<double> dist_l2;
  std::vector<double> dist_linf;
  std::vector<double> xi;
  PLPath last;
};

// Reference-preserving autoregressive chain: the proposal keeps nu^{N,eps}
// invariant so acceptance depends on the potential alone. beta tempers the
// potential (stepping-stone rungs); profile == nullptr skips the interface
// observables, keep_paths routes every kept path to the callback.
ChainResult mcmc_chain(const GibbsSpec& spec, const ChainConfig& cfg,
                       const InstantonProfile* profile = nullptr, double beta = 1.0,
                       const std::optional<PLPath>& init = std::nullopt,
                       const std::function<void(const PLPath&)>& on_sample = {});

struct ZEstimate {
  double log_z = 0.0;
  double se = 0.0;
  std::vector<double> betas;
  std::vector<double> rung_terms;
  std::vector<double> rung_weight_ess;  // weight effective sample fraction
};

std::vector<double> temper_ladder(int rungs, double power = 2.0);

// stepping-stone estimator along the inverse-temperature ladder
ZEstimate estimate_logz(const GibbsSpec& spec, const std::vector<double>& ladder,
                        const ChainConfig& cfg, int workers = 0);

struct RateEntry {
  double epsilon = 0.0;
  double delta = 0.0;
  double p_hat = 0.0;
  double se = 0.0;
  double eps_log_p = 0.0;
  bool upper_bound_only = false;  // no exceedance seen, p_hat is a 95% bound
  long n = 0;
};

struct RateCurve {
  PathNorm norm = PathNorm::L2;
  std::vector<RateEntry> entries;
};

// exceedance probabilities mu(dist(u, M) >= delta) at one epsilon
RateCurve rate_curve(const GibbsSpec& spec, const InstantonProfile& profile,
                     const ChainConfig& cfg, const std::vector<double>& deltas,
                     PathNorm norm, int n_chains, int workers = 0);

struct InterfaceOptions {
  double smear_halfwidth = 0.05;  // original-scale smearing radius
  int n_cells = 8;
  double band = 0.1;
  double trim = 0.8;              // KS window [-trim, trim]
  int n_chains = 8;
};

struct InterfaceStats {
  std::vector<double> xi_hat;     // interface positions mapped to [-1,1]
  double ks_trimmed = 1.0;
  double ks_first_vs_second_half = 1.0;
  double mean = 0.0;
  double variance = 0.0;
  long n_excluded = 0;            // samples without a usable interface
  std::vector<long> cell_counts;  // occupancy of the A_k bands
  long cell_unclassified = 0;
};

InterfaceStats interface_stats(const GibbsSpec& spec, const InstantonProfile& profile,
                               const ChainConfig& cfg, const InterfaceOptions& opts,
                               int workers = 0);

struct SmallNOracle {
  double log_z = 0.0;
  double mean_phi = 0.0;
  double mean_dist_l2 = 0.0;
  double mean_energy = 0.0;
  std::vector<double> node_mean;
  std::vector<double> node_sq;
  double boundary_mass_ratio = 0.0;
};

// tensor-product quadrature over the free nodes (2N-1 <= 3): normalizer and
// low-order moments of mu^{N,eps}
SmallNOracle direct_small_n_oracle(const GibbsSpec& spec, const InstantonProfile* profile,
                                   int resolution = 201, double box_halfwidth = 3.0);

}  // namespace kink
