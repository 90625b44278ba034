#include "kinklab/runner.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "kinklab/acceptance.hpp"
#include "kinklab/energy.hpp"
#include "kinklab/gaussian.hpp"
#include "kinklab/gibbs.hpp"
#include "kinklab/instanton.hpp"
#include "kinklab/manifest.hpp"
#include "kinklab/spde.hpp"
#include "kinklab/svg.hpp"

namespace kink {

namespace {

using nlohmann::json;

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Csv {
  std::ostringstream os;
  explicit Csv(const std::string& schema, const std::string& header) {
    os << "# schema: kinklab." << schema << ".v1\n" << header << "\n";
  }
  template <typename... Ts>
  void row(Ts... vals) {
    bool first = true;
    ((os << (first ? "" : ","), os << format_one(vals), first = false), ...);
    os << "\n";
  }
  static std::string format_one(double v) { return num17(v); }
  static std::string format_one(long v) { return std::to_string(v); }
  static std::string format_one(int v) { return std::to_string(v); }
  static std::string format_one(const std::string& s) { return s; }
  std::string str() const { return os.str(); }
};

std::string figure_instanton_overlay(const InstantonProfile& p) {
  SvgFigure fig(640, 420, "standing wave profile");
  fig.set_range(-8, 8, -1.1, 1.1);
  std::vector<double> xs, ys, yt;
  for (int i = 0; i <= 400; ++i) {
    const double s = -8.0 + 16.0 * i / 400;
    xs.push_back(s);
    ys.push_back(p.value(s));
    yt.push_back(std::tanh(s));
  }
  fig.polyline(xs, ys, "steelblue", 2.0);
  if (p.has_closed_form) fig.polyline(xs, yt, "crimson", 1.0, true);
  fig.xlabel("s");
  fig.ylabel("m(s)");
  if (p.has_closed_form) fig.annotate(0.03, 0.93, "solid: solver, dashed: tanh");
  return fig.str();
}

std::string figure_bound_domination(const ConcentrationReport& rep) {
  SvgFigure fig(640, 420, "tail bound: " + rep.bound_name);
  double rmax = 0.0, lmin = 0.0;
  for (std::size_t i = 0; i < rep.r_grid.size(); ++i) {
    rmax = std::max(rmax, rep.r_grid[i]);
    if (rep.theoretical_p[i] > 0) lmin = std::min(lmin, std::log10(rep.theoretical_p[i]));
    if (rep.empirical_p[i] > 0) lmin = std::min(lmin, std::log10(rep.empirical_p[i]));
  }
  fig.set_range(0, rmax * 1.05, lmin - 0.5, 0.2);
  std::vector<double> xs, yb, ye;
  for (std::size_t i = 0; i < rep.r_grid.size(); ++i) {
    xs.push_back(rep.r_grid[i]);
    yb.push_back(std::log10(std::max(1e-12, rep.theoretical_p[i])));
    ye.push_back(std::log10(std::max(1e-12, rep.empirical_p[i] + 0.5 / rep.n_samples)));
  }
  fig.polyline(xs, yb, "crimson", 1.5, true);
  fig.points(xs, ye, "steelblue", 3.0);
  fig.xlabel("r");
  fig.ylabel("log10 P(exceed)");
  fig.annotate(0.03, 0.08, "dots: empirical, dashed: bound");
  return fig.str();
}

std::string figure_rate_curves(const std::vector<RateCurve>& curves, double c0_hat) {
  SvgFigure fig(640, 420, "concentration rate");
  double xmax = 0.0, ymin = 0.0;
  for (const auto& c : curves)
    for (const auto& e : c.entries) {
      xmax = std::max(xmax, e.delta * e.delta);
      ymin = std::min(ymin, e.eps_log_p);
    }
  fig.set_range(0, xmax * 1.1, ymin * 1.2, 0.05);
  const std::vector<std::string> colors = {"steelblue", "seagreen", "darkorange",
                                           "purple", "crimson", "teal"};
  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    std::vector<double> xs, ys;
    for (const auto& e : curves[ci].entries) {
      xs.push_back(e.delta * e.delta);
      ys.push_back(e.eps_log_p);
    }
    fig.points(xs, ys, colors[ci % colors.size()], 3.0);
    fig.polyline(xs, ys, colors[ci % colors.size()], 1.0);
  }
  std::vector<double> rx{0.0, xmax * 1.1}, ry{0.0, -c0_hat * xmax * 1.1};
  fig.polyline(rx, ry, "black", 1.0, true);
  fig.xlabel("delta^2");
  fig.ylabel("eps log p");
  fig.annotate(0.03, 0.08, "dashed: -c0 delta^2 reference");
  return fig.str();
}

std::string figure_interface_hist(const InterfaceStats& st, double trim) {
  SvgFigure fig(640, 420, "interface position");
  const int nb = 24;
  std::vector<double> centers(nb), heights(nb, 0.0);
  long total = 0;
  for (double x : st.xi_hat)
    if (x >= -trim && x <= trim) ++total;
  for (int b = 0; b < nb; ++b) centers[b] = -trim + (b + 0.5) * 2 * trim / nb;
  for (double x : st.xi_hat) {
    if (x < -trim || x > trim) continue;
    int b = static_cast<int>((x + trim) / (2 * trim / nb));
    b = std::min(b, nb - 1);
    heights[b] += 1.0;
  }
  double hmax = 0.0;
  const double uniform = static_cast<double>(total) / nb;
  for (double& h : heights) hmax = std::max(hmax, h);
  fig.set_range(-trim, trim, 0, std::max(hmax, uniform) * 1.15);
  fig.bars(centers, heights, 2 * trim / nb * 0.9, "steelblue");
  fig.hline(uniform, "crimson");
  fig.xlabel("xi");
  fig.ylabel("count");
  std::ostringstream an;
  an << "KS to Uniform[" << -trim << "," << trim << "] = " << st.ks_trimmed;
  fig.annotate(0.03, 0.93, an.str());
  return fig.str();
}

std::string out_dir_for(const ExperimentConfig& cfg) {
  const char* env = std::getenv("KINKLAB_OUTDIR");
  return env != nullptr ? env : cfg.out_dir();
}

void run_instanton(const ExperimentConfig& cfg, OutputWriter& w) {
  const auto spec = cfg.potential();
  const auto rep = assert_double_well(spec, probe_grid());
  const auto p = solve_profile(spec, cfg.num("instanton.tol", 1e-10),
                               static_cast<int>(cfg.integer("instanton.table_size", 4096)));
  Csv csv("instanton_table", "s,m,dm,residual");
  for (std::size_t i = 0; i < p.tab_m.size(); ++i) {
    const double s = i * p.ds;
    const double res = p.tab_dm[i] - std::sqrt(std::max(0.0, 2.0 * spec.F(p.tab_m[i])));
    csv.row(s, p.tab_m[i], p.tab_dm[i], res);
  }
  w.write("instanton_table.csv", csv.str());

  json j;
  j["c1"] = p.c1;
  j["c2"] = p.c2;
  j["T_tab"] = p.T_tab;
  j["tail_amp"] = p.tail_amp;
  j["max_ode_residual"] = p.max_ode_residual();
  j["surface_tension"] = surface_tension(spec);
  j["dm_l2_sq"] = p.norm_dm_sq();  // equals the surface tension
  j["assumptions_pass"] = rep.all_pass;
  w.write("instanton_summary.json", j.dump(2) + "\n");
  w.write("instanton_overlay.svg", figure_instanton_overlay(p));
}

void run_spectrum(const ExperimentConfig& cfg, OutputWriter& w) {
  const auto spec = cfg.potential();
  const auto p = solve_profile(spec);
  const auto rep = spectral_report(p, cfg.num("spectrum.h", 0.01), cfg.num("spectrum.T", 20.0));
  json j;
  j["h"] = rep.h;
  j["T"] = rep.T;
  j["lambda0"] = rep.lambda0;
  j["lambda1"] = rep.lambda1;
  j["constrained_gap"] = rep.constrained_gap;
  j["eigvec0_alignment"] = rep.eigvec0_alignment;
  j["landscape_c0"] = landscape_c0(rep, spec);
  w.write("spectrum.json", j.dump(2) + "\n");
  Csv csv("eigvec", "x,e0");
  for (std::size_t i = 0; i < rep.grid.size(); ++i) csv.row(rep.grid[i], rep.eigvec0[i]);
  w.write("eigvec0.csv", csv.str());
}

void run_sample_bridge(const ExperimentConfig& cfg, OutputWriter& w) {
  const auto par = cfg.scale_params();
  const BridgeSpec spec{par};
  const long n = cfg.integer("bridge.samples", 100000);
  const int M = static_cast<int>(cfg.integer("bridge.refine_m", 8));
  RngStream rng(cfg.master_seed());

  // covariance diagnostics at a few nodes
  RunningStats var0;
  std::vector<int> probes = {par.N, par.N / 2, 3 * par.N / 2};
  std::vector<RunningStats> cov(probes.size());
  RngStream diag_rng = rng.derive(7);
  for (long i = 0; i < std::min<long>(n, 200000); ++i) {
    RngStream rs = diag_rng.derive(i);
    const PLPath u = sample_bridge(spec, rs);
    const double c0 = u.values[par.N] - spec.mean(par.node(par.N));
    var0.add(c0 * c0);
    for (std::size_t q = 0; q < probes.size(); ++q) {
      const double cq = u.values[probes[q]] - spec.mean(par.node(probes[q]));
      cov[q].add(c0 * cq);
    }
  }

  const auto grids = default_r_grids(par);
  const auto reports = discretization_tails(spec, n, M, grids, rng.derive(11), cfg.workers());

  json j;
  j["epsilon"] = par.epsilon;
  j["gamma"] = par.gamma;
  j["N"] = par.N;
  j["samples"] = n;
  j["var_u0_empirical"] = var0.mean;
  j["var_u0_kernel"] = spec.kernel(0.0, 0.0);
  j["var_u0_se"] = var0.se();
  for (std::size_t q = 0; q < probes.size(); ++q) {
    j["cov_probes"].push_back({{"node", probes[q]},
                               {"empirical", cov[q].mean},
                               {"kernel", spec.kernel(par.node(par.N), par.node(probes[q]))},
                               {"se", cov[q].se()}});
  }
  j["normalizer_log_product"] = log_density_normalizer_product(spec);
  j["normalizer_log_determinant"] = log_density_normalizer_determinant(spec);
  j["mean_disc_l2_sq"] = reports[0].stat_sq.mean;
  j["mean_disc_l2_sq_exact"] = par.epsilon * std::pow(par.half_length(), 2) / (3.0 * par.N);
  for (const auto& rep : reports) j["dominated"].push_back(rep.dominated());
  w.write("bridge_diagnostics.json", j.dump(2) + "\n");

  Csv csv("concentration", "bound,r,empirical_p,theoretical_p,se,n");
  for (const auto& rep : reports) {
    for (std::size_t i = 0; i < rep.r_grid.size(); ++i)
      csv.row(rep.bound_name, rep.r_grid[i], rep.empirical_p[i], rep.theoretical_p[i],
              binomial_se(rep.empirical_p[i], rep.n_samples), rep.n_samples);
  }
  w.write("concentration.csv", csv.str());
  for (const auto& rep : reports)
    w.write("bound_" + rep.bound_name + ".svg", figure_bound_domination(rep));

  const long dump = cfg.integer("bridge.dump_samples", 0);
  if (dump > 0) {
    Csv sc("bridge_samples", "sample,node,s,u");
    RngStream ds = rng.derive(13);
    for (long i = 0; i < dump; ++i) {
      RngStream rs = ds.derive(i);
      const PLPath u = sample_bridge(spec, rs);
      for (int k = 0; k < par.n_nodes(); ++k)
        sc.row(i, static_cast<long>(k), par.node(k), u.values[k]);
    }
    w.write("bridge_samples.csv", sc.str());
  }
}

void run_sample_gibbs(const ExperimentConfig& cfg, OutputWriter& w) {
  const auto spec = cfg.potential();
  const auto par = cfg.scale_params();
  const auto profile = solve_profile(spec);
  const GibbsSpec gspec{BridgeSpec{par}, spec, 8};
  const auto res = mcmc_chain(gspec, cfg.chain(), &profile);

  json j;
  j["acceptance_rate"] = res.report.acceptance_rate;
  j["rho_final"] = res.report.rho_final;
  j["kept"] = res.report.kept;
  j["thin"] = res.report.thin;
  j["ess_phi"] = res.report.ess_phi;
  j["ess_xi"] = res.report.ess_xi;
  j["mean_phi"] = res.report.mean_phi;
  j["se_phi"] = res.report.se_phi;
  j["mean_energy"] = res.report.mean_energy;
  j["se_energy"] = res.report.se_energy;
  j["mean_dist_l2"] = res.report.mean_dist_l2;
  j["se_dist_l2"] = res.report.se_dist_l2;
  j["mean_dist_linf"] = res.report.mean_dist_linf;
  j["se_dist_linf"] = res.report.se_dist_linf;
  j["mean_xi"] = res.report.mean_xi;
  j["se_xi"] = res.report.se_xi;
  w.write("gibbs_report.json", j.dump(2) + "\n");

  Csv csv("gibbs_trace", "idx,phi,energy,dist_l2,dist_linf,xi");
  for (std::size_t i = 0; i < res.phi.size(); ++i)
    csv.row(static_cast<long>(i), res.phi[i], res.energy[i], res.dist_l2[i],
            res.dist_linf[i], res.xi[i]);
  w.write("gibbs_trace.csv", csv.str());
}

void run_logz(const ExperimentConfig& cfg, OutputWriter& w) {
  const auto spec = cfg.potential();
  auto epsilons = cfg.list("logz.epsilons");
  if (epsilons.empty()) epsilons = {cfg.num("epsilon", 0.2)};
  const auto ladder = temper_ladder(static_cast<int>(cfg.integer("ladder.rungs", 24)),
                                    cfg.num("ladder.power", 2.0));
  const double c_star = surface_tension(spec);

  Csv csv("logz", "epsilon,N,log_z,se,eps_log_z,gap_to_minus_cstar");
  json j;
  std::vector<double> xs, ys;
  for (double eps : epsilons) {
    const auto par = cfg.scale_params(eps);
    const GibbsSpec gspec{BridgeSpec{par}, spec, 8};
    const auto z = estimate_logz(gspec, ladder, cfg.chain(), cfg.workers());
    const double elz = eps * z.log_z;
    csv.row(eps, par.N, z.log_z, z.se, elz, elz + c_star);
    j["entries"].push_back({{"epsilon", eps},
                            {"N", par.N},
                            {"log_z", z.log_z},
                            {"se", z.se},
                            {"eps_log_z", elz}});
    xs.push_back(eps);
    ys.push_back(elz);
  }
  j["c_star"] = c_star;
  w.write("logz.csv", csv.str());
  w.write("logz.json", j.dump(2) + "\n");

  SvgFigure fig(640, 420, "normalization constant scaling");
  double ymin = -c_star * 1.3, ymax = 0.1;
  for (double y : ys) ymin = std::min(ymin, y * 1.1);
  fig.set_range(0, xs.empty() ? 1 : *std::max_element(xs.begin(), xs.end()) * 1.1, ymin, ymax);
  fig.points(xs, ys, "steelblue", 3.5);
  fig.hline(-c_star, "crimson");
  fig.xlabel("epsilon");
  fig.ylabel("eps log Z");
  fig.annotate(0.03, 0.08, "dashed: -C_*");
  w.write("logz.svg", fig.str());
}

void run_rates(const ExperimentConfig& cfg, OutputWriter& w) {
  const auto spec = cfg.potential();
  const auto profile = solve_profile(spec);
  auto epsilons = cfg.list("rates.epsilons");
  if (epsilons.empty()) epsilons = {cfg.num("epsilon", 0.2)};
  auto deltas = cfg.list("rates.deltas");
  if (deltas.empty()) deltas = {0.25, 0.5};
  const std::string norm_key = cfg.str("rates.norm", "L2");
  const PathNorm norm = norm_key == "Linf" ? PathNorm::Linf : PathNorm::L2;
  const int n_chains = static_cast<int>(cfg.integer("chain.chains", 8));

  const auto srep = spectral_report(profile, 0.02, std::max(16.0, 15.0 / profile.c2));
  const double c0 = landscape_c0(srep, spec);

  std::vector<RateCurve> curves;
  Csv csv("rates", "epsilon,delta,p_hat,se,eps_log_p,upper_bound_only,n");
  for (double eps : epsilons) {
    const auto par = cfg.scale_params(eps);
    const GibbsSpec gspec{BridgeSpec{par}, spec, 8};
    const auto curve = rate_curve(gspec, profile, cfg.chain(), deltas, norm, n_chains,
                                  cfg.workers());
    for (const auto& e : curve.entries)
      csv.row(e.epsilon, e.delta, e.p_hat, e.se, e.eps_log_p,
              static_cast<int>(e.upper_bound_only), e.n);
    curves.push_back(curve);
  }
  w.write("rates.csv", csv.str());
  json j;
  j["c0_hat"] = c0;
  j["norm"] = norm_key;
  w.write("rates.json", j.dump(2) + "\n");
  if (!curves.empty()) w.write("rates.svg", figure_rate_curves(curves, c0));
}

void run_interface(const ExperimentConfig& cfg, OutputWriter& w) {
  const auto spec = cfg.potential();
  const auto profile = solve_profile(spec);
  auto epsilons = cfg.list("interface.epsilons");
  if (epsilons.empty()) epsilons = {cfg.num("epsilon", 0.05)};

  InterfaceOptions opts;
  opts.smear_halfwidth = cfg.num("interface.smear", opts.smear_halfwidth);
  opts.n_cells = static_cast<int>(cfg.integer("interface.cells", opts.n_cells));
  opts.band = cfg.num("interface.band", opts.band);
  opts.trim = cfg.num("interface.trim", opts.trim);
  opts.n_chains = static_cast<int>(cfg.integer("chain.chains", opts.n_chains));

  json j;
  for (double eps : epsilons) {
    const auto par = cfg.scale_params(eps);
    const GibbsSpec gspec{BridgeSpec{par}, spec, 8};
    const auto st = interface_stats(gspec, profile, cfg.chain(), opts, cfg.workers());
    json je;
    je["epsilon"] = eps;
    je["n"] = static_cast<long>(st.xi_hat.size());
    je["ks_trimmed"] = st.ks_trimmed;
    je["ks_half_split"] = st.ks_first_vs_second_half;
    je["mean"] = st.mean;
    je["variance"] = st.variance;
    je["excluded"] = st.n_excluded;
    je["cell_counts"] = st.cell_counts;
    je["cell_unclassified"] = st.cell_unclassified;
    j["entries"].push_back(je);

    std::ostringstream name;
    name << "interface_eps" << eps;
    Csv csv("interface_samples", "xi");
    for (double x : st.xi_hat) csv.row(x);
    w.write(name.str() + ".csv", csv.str());
    w.write(name.str() + ".svg", figure_interface_hist(st, opts.trim));
  }
  w.write("interface.json", j.dump(2) + "\n");
}

void run_spde(const ExperimentConfig& cfg, OutputWriter& w) {
  const auto spec = cfg.potential();
  const auto profile = solve_profile(spec);
  const SPDEConfig scfg = cfg.spde();
  const auto traj = spde_run(scfg, spec, &profile);

  json j;
  j["n_steps"] = traj.n_steps;
  j["t_end"] = traj.t_end;
  j["mean_l2_sq"] = traj.obs_l2_sq.mean;
  j["se_l2_sq"] = batch_means_se(traj.trace_l2_sq);
  j["mean_var_center"] = traj.obs_var_center.mean;
  j["mean_dist_l2"] = traj.obs_dist_l2.mean;
  j["se_dist_l2"] = batch_means_se(traj.trace_dist);
  w.write("spde_summary.json", j.dump(2) + "\n");

  Csv csv("spde_snapshots", "snapshot,t,x,u");
  for (std::size_t si = 0; si < traj.snapshots.size(); ++si) {
    const auto& st = traj.snapshots[si];
    csv.row(static_cast<long>(si), st.time, -1.0, -1.0);
    for (int i = 0; i < scfg.n_x; ++i)
      csv.row(static_cast<long>(si), st.time, -1.0 + (i + 1) * scfg.h(), st.interior[i]);
    csv.row(static_cast<long>(si), st.time, 1.0, 1.0);
  }
  w.write("spde_snapshots.csv", csv.str());
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult result;
  OutputWriter writer(out_dir_for(cfg));
  writer.set_config(cfg.serialize());
  writer.set_seed(cfg.master_seed());
  try {
    const std::string& kind = cfg.kind();
    if (kind == "instanton")
      run_instanton(cfg, writer);
    else if (kind == "spectrum")
      run_spectrum(cfg, writer);
    else if (kind == "sample-bridge")
      run_sample_bridge(cfg, writer);
    else if (kind == "sample-gibbs")
      run_sample_gibbs(cfg, writer);
    else if (kind == "logz")
      run_logz(cfg, writer);
    else if (kind == "rates")
      run_rates(cfg, writer);
    else if (kind == "interface")
      run_interface(cfg, writer);
    else if (kind == "spde")
      run_spde(cfg, writer);
    else if (kind == "verify") {
      AcceptanceOptions aopts;
      aopts.workers = cfg.workers();
      const auto results = run_acceptance(aopts);
      json j;
      bool all = true;
      for (const auto& r : results) {
        j["criteria"].push_back({{"id", r.id},
                                 {"name", r.name},
                                 {"pass", r.pass},
                                 {"detail", r.detail},
                                 {"seconds", r.seconds}});
        all = all && r.pass;
      }
      j["all_pass"] = all;
      writer.write("acceptance.json", j.dump(2) + "\n");
      if (!all) {
        writer.mark_failed("acceptance criteria failed");
        result.exit_code = 4;
      }
    }
  } catch (const ConfigError& e) {
    writer.mark_failed(e.what());
    result.exit_code = 2;
    result.message = e.what();
  } catch (const std::exception& e) {
    writer.mark_failed(e.what());
    result.exit_code = 3;
    result.message = e.what();
  }
  result.manifest_path = writer.finalize();
  return result;
}

}  // namespace kink
