#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "kinklab/gibbs.hpp"
#include "kinklab/stats.hpp"

using namespace kink;

namespace {

PotentialSpec zero_potential() {
  PotentialSpec s;
  s.name = "zero";
  s.F = [](double) { return 0.0; };
  s.dF = [](double) { return 0.0; };
  s.d2F = [](double) { return 0.0; };
  s.d3F = [](double) { return 0.0; };
  return s;
}

const InstantonProfile& quartic_profile() {
  static InstantonProfile p = solve_profile(quartic_potential());
  return p;
}

}  // namespace

TEST_CASE("zero potential: every proposal is accepted, law is the bridge") {
  const auto par = make_params(0.2, 0.3, 0.1, 0.5, 4);
  const GibbsSpec spec{BridgeSpec{par}, zero_potential(), 8};
  ChainConfig cfg;
  cfg.n_steps = 60000;
  cfg.burn_in = 1000;
  cfg.thin = 5;
  cfg.seed = 3;
  cfg.p_reflect = 0.0;
  cfg.adapt = false;
  cfg.rho = 0.3;

  std::vector<RunningStats> var(par.n_nodes());
  const auto res = mcmc_chain(spec, cfg, nullptr, 1.0, std::nullopt, [&](const PLPath& u) {
    for (int k = 1; k < par.n_nodes() - 1; ++k) {
      const double c = u.values[k] - spec.bridge.mean(par.node(k));
      var[k].add(c * c);
    }
  });
  CHECK(res.report.acceptance_rate == 1.0);
  for (int k = 1; k < par.n_nodes() - 1; ++k) {
    const double kern = spec.bridge.kernel(par.node(k), par.node(k));
    // autocorrelated chain: generous 6 sigma on the naive SE
    CHECK(std::abs(var[k].mean - kern) <= 6.0 * var[k].se() + 0.01 * kern);
  }
}

TEST_CASE("reflection symmetry of the chain law") {
  const auto par = make_params(0.4, 0.3, 0.1, 0.5, 2);
  const GibbsSpec spec{BridgeSpec{par}, quartic_potential(), 8};
  ChainConfig cfg;
  cfg.n_steps = 120000;
  cfg.burn_in = 10000;
  cfg.thin = 10;
  cfg.seed = 5;
  const auto res = mcmc_chain(spec, cfg, &quartic_profile());

  // mean interface position vanishes by symmetry
  CHECK(std::abs(res.report.mean_xi) <= 3.0 * res.report.se_xi);

  // xi and -xi samples agree in distribution (two-sample KS)
  std::vector<double> neg;
  for (double x : res.xi) neg.push_back(-x);
  CHECK(ks_two_sample_p(res.xi, neg) > 0.01);
}

TEST_CASE("small-N oracle basics") {
  const auto par = make_params(0.5, 0.4, 0.1, 0.5, 2);

  // zero potential: log Z = 0 up to quadrature
  {
    const GibbsSpec spec{BridgeSpec{par}, zero_potential(), 8};
    const auto oracle = direct_small_n_oracle(spec, nullptr, 201, 4.5);
    CHECK(std::abs(oracle.log_z) <= 1e-6);
  }

  const GibbsSpec spec{BridgeSpec{par}, quartic_potential(), 8};
  // box too small is detected
  CHECK_THROWS(direct_small_n_oracle(spec, nullptr, 201, 2.2));
  CHECK_THROWS(direct_small_n_oracle(spec, nullptr, 150, 4.5));

  // resolution refinement self-consistency
  const auto a = direct_small_n_oracle(spec, &quartic_profile(), 201, 4.5);
  const auto b = direct_small_n_oracle(spec, &quartic_profile(), 401, 4.5);
  CHECK(std::abs(a.log_z - b.log_z) < 1e-4);
  CHECK(a.mean_phi == doctest::Approx(b.mean_phi).epsilon(1e-4));
}

TEST_CASE("chain marginal matches the oracle density slice") {
  const auto par = make_params(0.5, 0.4, 0.1, 0.5, 2);
  const GibbsSpec spec{BridgeSpec{par}, quartic_potential(), 8};

  // oracle 1-d marginal of the center node by direct summation
  const double B = 4.5;
  const int R = 201;
  const double h = 2.0 * B / (R - 1);
  std::vector<double> marginal(R, 0.0);
  {
    const EnergyModel model(spec.potential, 8);
    PLPath u = zero_path(par, Boundary::FixedPlusMinus);
    double total = 0.0;
    for (int a = 0; a < R; ++a) {
      u.values[1] = -B + a * h;
      for (int b = 0; b < R; ++b) {
        u.values[2] = -B + b * h;
        for (int c = 0; c < R; ++c) {
          u.values[3] = -B + c * h;
          const double w = std::exp(log_density(spec.bridge, u) - model.phi(u));
          marginal[b] += w;
          total += w;
        }
      }
    }
    for (double& m : marginal) m /= total * h;
  }

  ChainConfig cfg;
  cfg.n_steps = 1000000;
  cfg.burn_in = 20000;
  cfg.thin = 1;
  cfg.seed = 6;
  std::vector<long> hist(R, 0);
  long kept = 0;
  mcmc_chain(spec, cfg, nullptr, 1.0, std::nullopt, [&](const PLPath& u) {
    const int b = static_cast<int>(std::floor((u.values[2] + B) / h + 0.5));
    if (b >= 0 && b < R) {
      ++hist[b];
      ++kept;
    }
  });

  // sup relative error over the central region (|x| <= 1.5 sd)
  double sd = 0.0;
  for (int b = 0; b < R; ++b) sd += marginal[b] * h * std::pow(-B + b * h, 2);
  sd = std::sqrt(sd);
  double worst = 0.0;
  for (int b = 0; b < R; ++b) {
    const double x = -B + b * h;
    if (std::abs(x) > 1.5 * sd) continue;
    const double emp = static_cast<double>(hist[b]) / (kept * h);
    worst = std::max(worst, std::abs(emp - marginal[b]) / marginal[b]);
  }
  CHECK(worst <= 0.05);
}

TEST_CASE("stepping stone: trivial ladder and oracle agreement") {
  const auto par = make_params(0.5, 0.4, 0.1, 0.5, 2);

  // zero potential: every rung term is exactly zero
  {
    const GibbsSpec spec{BridgeSpec{par}, zero_potential(), 8};
    ChainConfig cfg;
    cfg.n_steps = 4000;
    cfg.burn_in = 500;
    cfg.seed = 8;
    const auto z = estimate_logz(spec, temper_ladder(6), cfg, 2);
    CHECK(z.log_z == 0.0);
  }

  const GibbsSpec spec{BridgeSpec{par}, quartic_potential(), 8};
  const auto oracle = direct_small_n_oracle(spec, nullptr, 201, 4.5);
  ChainConfig cfg;
  cfg.n_steps = 150000;
  cfg.burn_in = 10000;
  cfg.thin = 5;
  cfg.seed = 9;
  const auto z = estimate_logz(spec, temper_ladder(20, 2.0), cfg, 2);
  CHECK(std::abs(z.log_z - oracle.log_z) <= 0.02 * std::abs(oracle.log_z));

  CHECK_THROWS(estimate_logz(spec, {0.0, 0.5}, cfg, 2));       // ladder must end at 1
  CHECK_THROWS(estimate_logz(spec, {0.0, 0.0, 1.0}, cfg, 2));  // strictly increasing
}

TEST_CASE("chain mean matches the oracle") {
  const auto par = make_params(0.5, 0.4, 0.1, 0.5, 2);
  const GibbsSpec spec{BridgeSpec{par}, quartic_potential(), 8};
  const auto oracle = direct_small_n_oracle(spec, &quartic_profile(), 201, 4.5);

  ChainConfig cfg;
  cfg.n_steps = 200000;
  cfg.burn_in = 10000;
  cfg.thin = 10;
  cfg.seed = 10;
  const auto res = mcmc_chain(spec, cfg, &quartic_profile());
  CHECK(std::abs(res.report.mean_phi - oracle.mean_phi) <= 3.0 * res.report.se_phi);
  CHECK(std::abs(res.report.mean_dist_l2 - oracle.mean_dist_l2) <=
        3.0 * res.report.se_dist_l2 + 1e-3);
}

TEST_CASE("rate curve at delta = 0") {
  const auto par = make_params(0.4, 0.3, 0.1, 0.5, 2);
  const GibbsSpec spec{BridgeSpec{par}, quartic_potential(), 8};
  ChainConfig cfg;
  cfg.n_steps = 20000;
  cfg.burn_in = 2000;
  cfg.thin = 10;
  cfg.seed = 11;
  const auto curve = rate_curve(spec, quartic_profile(), cfg, {0.0, 0.4}, PathNorm::L2, 2, 2);
  CHECK(curve.entries[0].p_hat == 1.0);
  CHECK(curve.entries[0].eps_log_p == 0.0);
  CHECK(curve.entries[1].p_hat <= 1.0);
  CHECK(curve.entries[1].p_hat >= 0.0);
}

TEST_CASE("finite-dimensional density: transition-kernel product route") {
  // original-scaling kernels P_t(x,y) with variance eps^{1-gamma} t compose
  // to the same node density as the rescaled bridge
  const auto par = make_params(0.3, 0.3, 0.1, 0.5, 2);
  const BridgeSpec spec{par};
  RngStream rng(12);
  for (int trial = 0; trial < 25; ++trial) {
    PLPath u = zero_path(par, Boundary::FixedPlusMinus);
    for (int k = 1; k < par.n_nodes() - 1; ++k) u.values[k] = rng.uniform(-2, 2);

    const double var_scale = std::pow(par.epsilon, 1.0 - par.gamma);
    const double dt = 2.0 / (2.0 * par.N);  // original-scaling node spacing
    auto log_kernel = [&](double x, double y, double t) {
      const double v = var_scale * t;
      return -0.5 * (y - x) * (y - x) / v - 0.5 * std::log(2.0 * M_PI * v);
    };
    double lp = 0.0;
    for (int k = 0; k + 1 < par.n_nodes(); ++k)
      lp += log_kernel(u.values[k], u.values[k + 1], dt);
    lp -= log_kernel(-1.0, 1.0, 2.0);
    // node values are the same coordinates in both scalings and the
    // per-transition variances match, so the densities coincide
    CHECK(std::abs(lp - log_density(spec, u)) <= 1e-10);
  }
}

TEST_CASE("interface statistics at desk scale") {
  // gamma = 1/2 keeps the original-scale layer thinner than the band cells
  const auto par = make_params(0.05, 0.5, 0.2, 0.7);
  const GibbsSpec spec{BridgeSpec{par}, quartic_potential(), 8};
  ChainConfig cfg;
  cfg.n_steps = 60000;
  cfg.burn_in = 6000;
  cfg.thin = 20;
  cfg.seed = 13;
  cfg.p_reflect = 0.1;
  cfg.p_translate = 0.3;
  InterfaceOptions opts;
  opts.n_chains = 4;
  opts.n_cells = 4;
  opts.band = 0.2;
  const auto st = interface_stats(spec, quartic_profile(), cfg, opts, 2);

  CHECK(st.xi_hat.size() > 1000);
  CHECK(std::abs(st.mean) < 0.2);
  CHECK(st.variance > 0.05);
  CHECK(st.variance < 0.8);
  CHECK(st.ks_trimmed < 0.25);
  long classified = 0;
  for (long c : st.cell_counts) classified += c;
  CHECK(classified > 0);
}

TEST_CASE("translation move leaves the zero-potential law invariant") {
  const auto par = make_params(0.2, 0.3, 0.1, 0.5, 4);
  const GibbsSpec spec{BridgeSpec{par}, zero_potential(), 8};
  ChainConfig cfg;
  cfg.n_steps = 80000;
  cfg.burn_in = 2000;
  cfg.thin = 5;
  cfg.seed = 21;
  cfg.p_translate = 0.4;
  cfg.adapt = false;
  cfg.rho = 0.3;
  std::vector<RunningStats> var(par.n_nodes());
  const auto res = mcmc_chain(spec, cfg, nullptr, 1.0, std::nullopt, [&](const PLPath& u) {
    for (int k = 1; k < par.n_nodes() - 1; ++k) {
      const double c = u.values[k] - spec.bridge.mean(par.node(k));
      var[k].add(c * c);
    }
  });
  CHECK(res.report.translate_rate > 0.2);
  for (int k = 1; k < par.n_nodes() - 1; ++k) {
    const double kern = spec.bridge.kernel(par.node(k), par.node(k));
    CHECK(std::abs(var[k].mean - kern) <= 6.0 * var[k].se() + 0.015 * kern);
  }
}
