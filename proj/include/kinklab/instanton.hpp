#pragma once

#include <vector>

#include "kinklab/grid.hpp"
#include "kinklab/potential.hpp"

namespace kink {

// Standing-wave profile m: m' = sqrt(2F(m)), m(0) = 0, m(+-inf) = +-1.
// Values are tabulated on a uniform s-grid over [0, T_tab] (odd symmetry
// supplies s < 0) and served from the fitted exponential tail beyond.
class InstantonProfile {
 public:
  PotentialSpec spec;
  double c1 = 0.0;     // tail envelope constant, |1 -+ m(+-s)| <= c1 exp(-c2 s)
  double c2 = 0.0;     // decay rate sqrt(F''(1))
  double T_tab = 0.0;  // truncation radius, analytic tail beyond
  double solver_tol = 0.0;

  double value(double s) const;        // m(s)
  double derivative(double s) const;   // m'(s)
  double second_derivative(double s) const { return spec.dF(value(s)); }  // m'' = F'(m)
  double one_minus(double s) const;    // 1 - m(s) for s >= 0, accurate in the tail

  // int_x^inf (1-m)^2 and int_x^inf m'^2 for x >= -T_tab (whole-line norms)
  double tail_sq_integral(double x) const;
  double tail_dsq_integral(double x) const;
  double norm_dm_sq() const { return 2.0 * tail_dsq_integral(0.0); }  // == C_*

  // sup over cell midpoints of |m' - sqrt(2F(m))| for the interpolant
  double max_ode_residual() const;

  bool has_closed_form = false;  // quartic -> tanh

  // table internals (public for the CLI table dump)
  double ds = 0.0;
  std::vector<double> tab_m, tab_dm;       // at s_i = i*ds
  std::vector<double> tab_tsq, tab_tdsq;   // cumulative tail integrals at s_i
  double tail_amp = 0.0;                   // fitted amplitude, m ~ 1 - tail_amp e^{-c2 s}
  double tail_serve = 0.0;                 // beyond this the table cannot resolve 1-m

 private:
  double hermite(const std::vector<double>& f, const std::vector<double>& df,
                 double s) const;
};

InstantonProfile solve_profile(const PotentialSpec& spec, double tol = 1e-10,
                               int table_size = 4096, double T_tab = 0.0);

// m_xi(s) = m(s - xi)
double profile_at(const InstantonProfile& p, double s, double xi);

// Profile cut off outside [xi - a, xi + a] with a = epsilon^-gamma1:
// equals m_xi on the core, +-1 beyond xi +- (a+1), monotone quintic blend
// between with slope <= 2 c1 c2 exp(-c2 a).
class CutoffProfileView {
 public:
  CutoffProfileView(const InstantonProfile& p, const ScaleParams& params, double xi);
  double operator()(double s) const { return value(s); }
  double value(double s) const;
  double derivative(double s) const;
  double slope_bound() const;
  double core_radius() const { return a_; }
  double xi() const { return xi_; }

 private:
  double blend(double t) const;     // t in [0,1], right side
  double dblend(double t) const;
  const InstantonProfile* p_;
  double xi_, a_;
  double p0_, v0_, w0_;  // m, m', m'' at the core edge
};

CutoffProfileView cutoff_profile(const InstantonProfile& p, const ScaleParams& params,
                                 double xi);

struct DiscretizedProfile {
  ScaleParams params;
  double xi = 0.0;
  std::vector<double> values;  // 2N+1 node values, endpoints exactly -+1
};

DiscretizedProfile discretize_profile(const InstantonProfile& p, const ScaleParams& params,
                                      double xi);

struct ProfileErrorNorms {
  double l2_cutoff = 0.0;  // ||m_xi - m^eps_xi||_L2(R)
  double h1_cutoff = 0.0;  // derivative L2 error of the cutoff
  double l2_disc = 0.0;    // ||m_xi - m^{N,eps}_xi||_L2(R)
  double h1_disc = 0.0;    // derivative L2 error of the discretization
};

ProfileErrorNorms profile_error_norms(const InstantonProfile& p, const ScaleParams& params,
                                      double xi);

}  // namespace kink
