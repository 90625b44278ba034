#include "kinklab/spde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kinklab/energy.hpp"
#include "kinklab/stats.hpp"

namespace kink {

void SPDEConfig::check(const PotentialSpec& spec) const {
  std::vector<std::string> bad;
  if (n_x < 3) bad.push_back("n_x >= 3");
  if (t_end <= 0.0) bad.push_back("t_end > 0");
  const double hh = h();
  const double step = dt_or_default();
  if (!(step > 0.0)) bad.push_back("dt > 0");
  if (step > hh * hh / 2.0) bad.push_back("dt <= h^2/2 (explicit reaction stability)");
  double sup_d2 = 0.0;
  for (double u : probe_grid(-2.0, 2.0, 801)) sup_d2 = std::max(sup_d2, std::abs(spec.d2F(u)));
  if (step * std::pow(epsilon, -2.0 * gamma) * sup_d2 > 1.0)
    bad.push_back("dt * eps^{-2 gamma} * sup|F''| <= 1 (reaction stiffness)");
  // interface width ~ 6/c2 * eps^gamma in the original scaling; resolve it
  const double c2 = std::sqrt(std::max(1e-12, spec.d2F(1.0)));
  const double width = 6.0 / c2 * std::pow(epsilon, gamma);
  if (width / hh < 8.0) bad.push_back("interface resolution: >= 8 nodes across |u| < 0.9");
  if (!bad.empty()) {
    std::ostringstream os;
    os << "spde config invalid:";
    for (const auto& b : bad) os << "\n  violated: " << b;
    throw std::invalid_argument(os.str());
  }
}

SPDEStepper::SPDEStepper(const SPDEConfig& cfg, PotentialSpec spec)
    : cfg_(cfg), spec_(std::move(spec)) {
  cfg_.check(spec_);
  const int n = cfg_.n_x;
  const double h = cfg_.h();
  const double dt = cfg_.dt_or_default();
  const double c = dt / (h * h);
  // prefactored LDL^T of I - dt Lap_h
  fac_d_.resize(n);
  fac_l_.resize(n - 1);
  double d = 1.0 + 2.0 * c;
  fac_d_[0] = d;
  for (int i = 1; i < n; ++i) {
    fac_l_[i - 1] = -c / d;
    d = 1.0 + 2.0 * c - fac_l_[i - 1] * (-c);
    fac_d_[i] = d;
  }
  // Langevin pair for the target measure: reaction eps^{-2 gamma}, noise
  // sqrt(2) eps^{(1-gamma)/2}, so the stationary Gaussian part carries the
  // bridge covariance eps^{1-gamma} (-Lap)^{-1}
  noise_scale_ =
      std::sqrt(2.0) * std::pow(cfg_.epsilon, 0.5 * (1.0 - cfg_.gamma)) * std::sqrt(dt / h);
}

FieldState SPDEStepper::initial() const {
  FieldState st;
  st.interior.resize(cfg_.n_x);
  const double h = cfg_.h();
  for (int i = 0; i < cfg_.n_x; ++i) st.interior[i] = -1.0 + (i + 1) * h;
  return st;
}

void SPDEStepper::step(FieldState& state, RngStream& rng) const {
  const int n = cfg_.n_x;
  const double h = cfg_.h();
  const double dt = cfg_.dt_or_default();
  const double c = dt / (h * h);
  const double react = dt * std::pow(cfg_.epsilon, -2.0 * cfg_.gamma);

  std::vector<double>& u = state.interior;
  std::vector<double> rhs(n);
  for (int i = 0; i < n; ++i) {
    rhs[i] = u[i] - react * spec_.dF(u[i]);
    if (cfg_.noise_on) rhs[i] += noise_scale_ * rng.normal();
  }
  rhs[0] += c * (-1.0);
  rhs[n - 1] += c * (1.0);

  // Thomas solve of (I - dt Lap_h) x = rhs with the prefactored pivots
  for (int i = 1; i < n; ++i) rhs[i] -= fac_l_[i - 1] * rhs[i - 1];
  rhs[n - 1] /= fac_d_[n - 1];
  for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] + c * rhs[i + 1]) / fac_d_[i];
  state.time += dt;
  u = rhs;
  for (double v : u) {
    if (!std::isfinite(v) || std::abs(v) > 10.0) {
      std::ostringstream os;
      os << "spde step: field blew up at t = " << state.time << "; reduce dt";
      throw std::runtime_error(os.str());
    }
  }
}

double SPDEStepper::lyapunov(const FieldState& state) const {
  const int n = cfg_.n_x;
  const double h = cfg_.h();
  const double w = std::pow(cfg_.epsilon, -2.0 * cfg_.gamma);
  double v = 0.0;
  double prev = -1.0;
  for (int i = 0; i <= n; ++i) {
    const double cur = i < n ? state.interior[i] : 1.0;
    const double du = (cur - prev) / h;
    v += 0.5 * du * du * h + w * 0.5 * (spec_.F(prev) + spec_.F(cur)) * h;
    prev = cur;
  }
  return v;
}

namespace {

double field_at(const SPDEConfig& cfg, const FieldState& st, double x) {
  const double h = cfg.h();
  if (x <= -1.0) return -1.0;
  if (x >= 1.0) return 1.0;
  const double t = (x + 1.0) / h;  // node index + fraction, node 0 at x=-1
  const int k = std::min(static_cast<int>(std::floor(t)), cfg.n_x);
  const double frac = t - k;
  const double a = k == 0 ? -1.0 : st.interior[k - 1];
  const double b = k == cfg.n_x ? 1.0 : st.interior[k];
  return a * (1.0 - frac) + b * frac;
}

}  // namespace

PLPath field_to_path(const SPDEConfig& cfg, const FieldState& state,
                     const ScaleParams& par) {
  const double scale = std::pow(par.epsilon, par.gamma);
  PLPath u = zero_path(par, Boundary::FixedPlusMinus);
  for (int k = 1; k < par.n_nodes() - 1; ++k)
    u.values[k] = field_at(cfg, state, scale * par.node(k));
  return u;
}

TrajectorySummary spde_run(const SPDEConfig& cfg, const PotentialSpec& spec,
                           const InstantonProfile* profile, double record_after_fraction,
                           int record_stride) {
  const SPDEStepper stepper(cfg, spec);
  RngStream rng(cfg.seed);
  FieldState st = stepper.initial();

  TrajectorySummary sum;
  const double dt = cfg.dt_or_default();
  const long n_steps = static_cast<long>(std::ceil(cfg.t_end / dt));
  const long record_from = static_cast<long>(record_after_fraction * n_steps);
  const double h = cfg.h();

  ScaleParams par;
  if (profile) {
    const double g2 = std::min(0.99, 1.25 * cfg.gamma + 0.05);
    par = make_params(cfg.epsilon, cfg.gamma, 0.5 * cfg.gamma, g2,
                      std::max(8, cfg.n_x / 4));
  }

  for (long s = 0; s < n_steps; ++s) {
    stepper.step(st, rng);
    if (s >= record_from && s % record_stride == 0) {
      double l2 = 0.0;
      double prev = -1.0;
      for (int i = 0; i <= cfg.n_x; ++i) {
        const double cur = i < cfg.n_x ? st.interior[i] : 1.0;
        l2 += h / 6.0 * (2 * prev * prev + 2 * prev * cur + 2 * cur * cur);
        prev = cur;
      }
      sum.obs_l2_sq.add(l2);
      sum.trace_l2_sq.push_back(l2);
      const double u0 = field_at(cfg, st, 0.0);
      sum.obs_var_center.add(u0 * u0);
      sum.trace_center_sq.push_back(u0 * u0);
      if (profile) {
        const PLPath path = field_to_path(cfg, st, par);
        const double d = dist_to_M(path, *profile, PathNorm::L2);
        sum.obs_dist_l2.add(d);
        sum.trace_dist.push_back(d);
      }
      if (cfg.snapshot_stride > 0 &&
          (s - record_from) % (record_stride * cfg.snapshot_stride) == 0)
        sum.snapshots.push_back(st);
    }
  }
  sum.n_steps = n_steps;
  sum.t_end = st.time;
  sum.final_state = st;
  return sum;
}

StationarityCheck stationarity_check(const SPDEConfig& cfg, const PotentialSpec& spec,
                                     const GibbsSpec& gibbs_spec,
                                     const InstantonProfile& profile,
                                     const ChainConfig& chain_cfg, int workers) {
  const ScaleParams& par = gibbs_spec.bridge.params;
  if (std::abs(cfg.epsilon - par.epsilon) > 1e-12 || std::abs(cfg.gamma - par.gamma) > 1e-12)
    throw std::domain_error("stationarity_check: SPDE and Gibbs scale parameters differ");

  // SPDE side
  const TrajectorySummary traj = spde_run(cfg, spec, &profile);

  // Gibbs side: dist trace and the L2 mass mapped to the original interval
  const double scale = std::pow(par.epsilon, par.gamma);
  std::vector<double> g_l2, g_dist;
  ChainConfig ccfg = chain_cfg;
  const ChainResult res = mcmc_chain(gibbs_spec, ccfg, &profile, 1.0, std::nullopt,
                                     [&](const PLPath& u) {
                                       double l2 = 0.0;
                                       const double delta = u.params.mesh();
                                       for (int k = 0; k + 1 < u.n_nodes(); ++k) {
                                         const double a = u.values[k], b = u.values[k + 1];
                                         l2 += delta / 6.0 * (2 * a * a + 2 * a * b + 2 * b * b);
                                       }
                                       g_l2.push_back(scale * l2);
                                     });
  (void)workers;
  g_dist = res.dist_l2;

  StationarityCheck out;
  auto add = [&out](const std::string& name, const std::vector<double>& a,
                    const std::vector<double>& b) {
    StationarityEntry e;
    e.name = name;
    double ma = 0.0, mb = 0.0;
    for (double x : a) ma += x;
    for (double x : b) mb += x;
    ma /= a.empty() ? 1 : a.size();
    mb /= b.empty() ? 1 : b.size();
    e.spde_mean = ma;
    e.spde_se = batch_means_se(a);
    e.gibbs_mean = mb;
    e.gibbs_se = batch_means_se(b);
    const double se = std::sqrt(e.spde_se * e.spde_se + e.gibbs_se * e.gibbs_se);
    e.z = se > 0.0 ? (ma - mb) / se : 0.0;
    out.entries.push_back(e);
    out.max_abs_z = std::max(out.max_abs_z, std::abs(e.z));
  };
  add("l2_mass", traj.trace_l2_sq, g_l2);
  add("dist_l2", traj.trace_dist, g_dist);
  return out;
}

}  // namespace kink
