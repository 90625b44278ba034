#include "kinklab/instanton.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kinklab/quadrature.hpp"

namespace kink {

namespace {

// cubic Hermite on one cell, nodes at 0 and 1
inline double hermite_cell(double f0, double d0, double f1, double d1, double t) {
  const double t2 = t * t, t3 = t2 * t;
  return f0 * (1 - 3 * t2 + 2 * t3) + d0 * (t - 2 * t2 + t3) + f1 * (3 * t2 - 2 * t3) +
         d1 * (t3 - t2);
}

inline double hermite_cell_deriv(double f0, double d0, double f1, double d1, double t) {
  const double t2 = t * t;
  return f0 * (6 * t2 - 6 * t) + d0 * (1 - 4 * t + 3 * t2) + f1 * (6 * t - 6 * t2) +
         d1 * (3 * t2 - 2 * t);
}

}  // namespace

double InstantonProfile::hermite(const std::vector<double>& f, const std::vector<double>& df,
                                 double s) const {
  const double t = s / ds;
  int i = static_cast<int>(std::floor(t));
  i = std::min(std::max(i, 0), static_cast<int>(f.size()) - 2);
  const double u = t - i;
  return hermite_cell(f[i], df[i] * ds, f[i + 1], df[i + 1] * ds, u);
}

double InstantonProfile::one_minus(double s) const {
  if (s >= tail_serve) return tail_amp * std::exp(-c2 * s);
  if (s < 0.0) return 1.0 - value(s);
  return 1.0 - hermite(tab_m, tab_dm, s);
}

double InstantonProfile::value(double s) const {
  const double a = std::abs(s);
  const double sgn = s >= 0 ? 1.0 : -1.0;
  if (a >= T_tab) return sgn * (1.0 - tail_amp * std::exp(-c2 * a));
  return sgn * hermite(tab_m, tab_dm, a);
}

double InstantonProfile::derivative(double s) const {
  const double a = std::abs(s);
  if (a >= tail_serve) return c2 * tail_amp * std::exp(-c2 * a);
  // Hermite on the derivative table with m'' = F'(m) as slopes
  const double t = a / ds;
  int i = static_cast<int>(std::floor(t));
  i = std::min(std::max(i, 0), static_cast<int>(tab_dm.size()) - 2);
  const double u = t - i;
  const double dd0 = spec.dF(tab_m[i]);
  const double dd1 = spec.dF(tab_m[i + 1]);
  return hermite_cell(tab_dm[i], dd0 * ds, tab_dm[i + 1], dd1 * ds, u);
}

double InstantonProfile::tail_sq_integral(double x) const {
  if (x >= T_tab) {
    const double q = tail_amp * std::exp(-c2 * x);
    return q * q / (2.0 * c2);
  }
  if (x < 0.0) {
    // int_x^inf (1-m)^2 = int_x^0 (1-m)^2 + Tsq(0); on (x,0) use symmetry
    // (1 - m(s))^2 with m(-t) = -m(t): (1 + m(t))^2 over (0,-x)
    auto f = [this](double t) { const double q = 1.0 + value(t); return q * q; };
    return integrate_fn(f, 0.0, -x, 16) + tab_tsq[0];
  }
  const double t = x / ds;
  int i = static_cast<int>(std::floor(t));
  i = std::min(std::max(i, 0), static_cast<int>(tab_tsq.size()) - 2);
  const double u = t - i;
  auto dv = [this](int k) { const double q = 1.0 - tab_m[k]; return -q * q; };
  return hermite_cell(tab_tsq[i], dv(i) * ds, tab_tsq[i + 1], dv(i + 1) * ds, u);
}

double InstantonProfile::tail_dsq_integral(double x) const {
  if (x >= T_tab) {
    const double q = c2 * tail_amp * std::exp(-c2 * x);
    return q * q / (2.0 * c2);
  }
  if (x < 0.0) {
    auto f = [this](double t) { const double q = derivative(t); return q * q; };
    return integrate_fn(f, 0.0, -x, 16) + tab_tdsq[0];
  }
  const double t = x / ds;
  int i = static_cast<int>(std::floor(t));
  i = std::min(std::max(i, 0), static_cast<int>(tab_tdsq.size()) - 2);
  const double u = t - i;
  auto dv = [this](int k) { const double q = tab_dm[k]; return -q * q; };
  return hermite_cell(tab_tdsq[i], dv(i) * ds, tab_tdsq[i + 1], dv(i + 1) * ds, u);
}

double InstantonProfile::max_ode_residual() const {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < tab_m.size(); ++i) {
    const double s = (i + 0.5) * ds;
    const double r = std::abs(derivative(s) - std::sqrt(std::max(0.0, 2.0 * spec.F(value(s)))));
    worst = std::max(worst, r);
  }
  return worst;
}

InstantonProfile solve_profile(const PotentialSpec& spec, double tol, int table_size,
                               double T_tab) {
  const double d2f1 = spec.d2F(1.0);
  if (!(d2f1 > 0.0))
    throw std::invalid_argument(
        "solve_profile: F''(1) <= 0, the well integral 1/sqrt(2F) is not integrable");

  InstantonProfile p;
  p.spec = spec;
  p.solver_tol = tol;
  p.c2 = std::sqrt(d2f1);
  p.T_tab = T_tab > 0.0 ? T_tab : 40.0 / p.c2;
  p.has_closed_form = (spec.name == "quartic");

  // s(m) on a grid graded geometrically toward m = 1: tau = -log(1-m)
  const double tau_max = 30.0;
  const int n_graded = 3000;
  std::vector<double> gs(n_graded + 1), gm(n_graded + 1);
  gs[0] = 0.0;
  gm[0] = 0.0;
  auto integrand = [&spec](double t) {
    return 1.0 / std::sqrt(std::max(1e-300, 2.0 * spec.F(t)));
  };
  for (int j = 1; j <= n_graded; ++j) {
    gm[j] = 1.0 - std::exp(-tau_max * j / n_graded);
    gs[j] = gs[j - 1] + integrate_adaptive(integrand, gm[j - 1], gm[j], tol * 1e-4, 12);
  }

  // fit the tail amplitude on a window where 1-m is well resolved
  double amp_sum = 0.0;
  int amp_n = 0;
  for (int j = 0; j <= n_graded; ++j) {
    const double om = 1.0 - gm[j];
    if (om < 1e-10 || om > 1e-6) continue;
    amp_sum += std::log(om) + p.c2 * gs[j];
    ++amp_n;
  }
  if (amp_n == 0) throw std::runtime_error("solve_profile: empty tail fit window");
  p.tail_amp = std::exp(amp_sum / amp_n);
  // past this point 1-m drops under ~1e-13 and the table entry rounds to 1
  p.tail_serve = std::min(p.T_tab, std::log(p.tail_amp / 1e-13) / p.c2);

  // resample onto the uniform s-table; serve the fitted tail beyond the
  // graded data (1-m below double resolution there anyway)
  p.ds = p.T_tab / (table_size - 1);
  p.tab_m.resize(table_size);
  p.tab_dm.resize(table_size);
  const double s_core = gs[n_graded];
  std::size_t hint = 0;
  for (int i = 0; i < table_size; ++i) {
    const double s = i * p.ds;
    double m;
    if (s >= s_core) {
      m = 1.0 - p.tail_amp * std::exp(-p.c2 * s);
    } else {
      while (hint + 1 < gs.size() && gs[hint + 1] < s) ++hint;
      const std::size_t k = std::min(hint, gs.size() - 2);
      const double h = gs[k + 1] - gs[k];
      const double t = (s - gs[k]) / h;
      const double d0 = std::sqrt(std::max(0.0, 2.0 * spec.F(gm[k])));
      const double d1 = std::sqrt(std::max(0.0, 2.0 * spec.F(gm[k + 1])));
      m = hermite_cell(gm[k], d0 * h, gm[k + 1], d1 * h, t);
    }
    m = std::min(m, 1.0);
    p.tab_m[i] = m;
    p.tab_dm[i] = std::sqrt(std::max(0.0, 2.0 * spec.F(m)));
  }
  // enforce monotone table (roundoff at the flat far end)
  for (int i = 1; i < table_size; ++i) p.tab_m[i] = std::max(p.tab_m[i], p.tab_m[i - 1]);

  // envelope constant: bound 1-m, m'/c2 and m''/c2^2 on the table, then pad
  // so the quintic cutoff blend obeys the 2 c1 c2 slope bound
  double env = 1.0;
  for (int i = 0; i < table_size; ++i) {
    const double om = 1.0 - p.tab_m[i];
    if (om < 1e-12) continue;  // below double resolution, tail formula governs
    const double grow = std::exp(p.c2 * i * p.ds);
    env = std::max(env, om * grow);
    env = std::max(env, p.tab_dm[i] * grow / p.c2);
    env = std::max(env, std::abs(spec.dF(p.tab_m[i])) * grow / (p.c2 * p.c2));
  }
  const double blend_pad = (1.875 + 1.1 * p.c2 + 0.15 * p.c2 * p.c2) / (2.0 * p.c2);
  p.c1 = env * std::max(1.0, blend_pad) * (1.0 + 1e-9);

  // cumulative tail integrals, backward accumulation with per-cell GL
  p.tab_tsq.resize(table_size);
  p.tab_tdsq.resize(table_size);
  {
    const double qe = p.tail_amp * std::exp(-p.c2 * p.T_tab);
    p.tab_tsq[table_size - 1] = qe * qe / (2.0 * p.c2);
    p.tab_tdsq[table_size - 1] = p.c2 * p.c2 * qe * qe / (2.0 * p.c2);
  }
  for (int i = table_size - 2; i >= 0; --i) {
    auto fsq = [&p](double s) { const double q = p.one_minus(s); return q * q; };
    auto fdsq = [&p](double s) { const double q = p.derivative(s); return q * q; };
    p.tab_tsq[i] = p.tab_tsq[i + 1] + integrate_fn(fsq, i * p.ds, (i + 1) * p.ds, 8);
    p.tab_tdsq[i] = p.tab_tdsq[i + 1] + integrate_fn(fdsq, i * p.ds, (i + 1) * p.ds, 8);
  }

  return p;
}

double profile_at(const InstantonProfile& p, double s, double xi) { return p.value(s - xi); }

CutoffProfileView::CutoffProfileView(const InstantonProfile& p, const ScaleParams& params,
                                     double xi)
    : p_(&p), xi_(xi), a_(params.cutoff_radius()) {
  const double w = params.shift_window();
  if (std::abs(xi) > w) {
    std::ostringstream os;
    os << "cutoff_profile: xi = " << xi << " outside the admissible shift window [" << -w
       << ", " << w << "]";
    throw std::domain_error(os.str());
  }
  p0_ = p.value(a_);
  v0_ = p.derivative(a_);
  w0_ = p.second_derivative(a_);
}

double CutoffProfileView::blend(double t) const {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
  const double h3 = 10 * t3 - 15 * t4 + 6 * t5;
  return p0_ * h0 + v0_ * h1 + w0_ * h2 + 1.0 * h3;
}

double CutoffProfileView::dblend(double t) const {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double d0 = -30 * t2 + 60 * t3 - 30 * t4;
  const double d1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
  const double d2 = t - 4.5 * t2 + 6 * t3 - 2.5 * t4;
  const double d3 = 30 * t2 - 60 * t3 + 30 * t4;
  return p0_ * d0 + v0_ * d1 + w0_ * d2 + 1.0 * d3;
}

double CutoffProfileView::value(double s) const {
  const double t = s - xi_;
  const double at = std::abs(t);
  const double sgn = t >= 0 ? 1.0 : -1.0;
  if (at <= a_) return p_->value(t);
  if (at >= a_ + 1.0) return sgn;
  return sgn * blend(at - a_);
}

double CutoffProfileView::derivative(double s) const {
  const double t = s - xi_;
  const double at = std::abs(t);
  if (at <= a_) return p_->derivative(t);
  if (at >= a_ + 1.0) return 0.0;
  return dblend(at - a_);
}

double CutoffProfileView::slope_bound() const {
  return 2.0 * p_->c1 * p_->c2 * std::exp(-p_->c2 * a_);
}

CutoffProfileView cutoff_profile(const InstantonProfile& p, const ScaleParams& params,
                                 double xi) {
  return CutoffProfileView(p, params, xi);
}

DiscretizedProfile discretize_profile(const InstantonProfile& p, const ScaleParams& params,
                                      double xi) {
  CutoffProfileView view(p, params, xi);
  DiscretizedProfile d;
  d.params = params;
  d.xi = xi;
  d.values.resize(params.n_nodes());
  for (int k = 0; k < params.n_nodes(); ++k) d.values[k] = view.value(params.node(k));
  d.values.front() = -1.0;
  d.values.back() = 1.0;
  return d;
}

ProfileErrorNorms profile_error_norms(const InstantonProfile& p, const ScaleParams& params,
                                      double xi) {
  const double a = params.cutoff_radius();

  // cutoff norms are translation invariant: blend zone + pure tail, doubled
  auto sq = [](double x) { return x * x; };
  const CutoffProfileView centered(p, params, 0.0);
  auto blend_v = [&](double t) { return sq(p.value(t) - centered.value(t)); };
  auto blend_d = [&](double t) { return sq(p.derivative(t) - centered.derivative(t)); };
  ProfileErrorNorms out;
  out.l2_cutoff =
      std::sqrt(2.0 * (integrate_fn(blend_v, a, a + 1.0, 32) + p.tail_sq_integral(a + 1.0)));
  out.h1_cutoff =
      std::sqrt(2.0 * (integrate_fn(blend_d, a, a + 1.0, 32) + p.tail_dsq_integral(a + 1.0)));

  // discretization norms against the linear interpolant on [-L, L]
  const DiscretizedProfile d = discretize_profile(p, params, xi);
  const double delta = params.mesh();
  double l2 = 0.0, h1 = 0.0;
  for (int k = 0; k < 2 * params.N; ++k) {
    const double s0 = params.node(k);
    const double y0 = d.values[k], y1 = d.values[k + 1];
    const double slope = (y1 - y0) / delta;
    auto fv = [&](double s) { return sq(p.value(s - xi) - (y0 + slope * (s - s0))); };
    auto fd = [&](double s) { return sq(p.derivative(s - xi) - slope); };
    l2 += integrate_fn(fv, s0, s0 + delta, 16);
    h1 += integrate_fn(fd, s0, s0 + delta, 16);
  }
  const double L = params.half_length();
  l2 += p.tail_sq_integral(L - xi) + p.tail_sq_integral(L + xi);
  h1 += p.tail_dsq_integral(L - xi) + p.tail_dsq_integral(L + xi);
  out.l2_disc = std::sqrt(l2);
  out.h1_disc = std::sqrt(h1);
  return out;
}

}  // namespace kink
