#include "kinklab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "kinklab/linalg.hpp"
#include "kinklab/quadrature.hpp"

namespace kink {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// golden-section minimization; returns the best evaluated point so that
// plateaued objectives (Linf distances) cannot drift to a plateau edge
template <typename F>
double golden_min(F&& f, double a, double b, double tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  double xb = fc < fd ? c : d;
  double fb = std::min(fc, fd);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
    if (fc < fb) {
      fb = fc;
      xb = c;
    }
    if (fd < fb) {
      fb = fd;
      xb = d;
    }
  }
  return xb;
}

}  // namespace

EnergyModel::EnergyModel(PotentialSpec spec, int quad_order)
    : spec_(std::move(spec)), c_star_(surface_tension(spec_)), order_(quad_order) {}

double EnergyModel::energy(const PLPath& u) const {
  if (u.boundary != Boundary::FixedPlusMinus)
    throw std::domain_error("energy: defined only for paths with -1/+1 boundary data");
  const double delta = u.params.mesh();
  const GaussRule& r = gauss_rule(order_);
  double kin = 0.0, pot = 0.0;
  for (int k = 0; k < 2 * u.params.N; ++k) {
    const double y0 = u.values[k], y1 = u.values[k + 1];
    const double dx = y1 - y0;
    kin += dx * dx / (2.0 * delta);
    double cell = 0.0;
    for (std::size_t q = 0; q < r.x.size(); ++q) {
      const double t = 0.5 * (1.0 + r.x[q]);
      cell += r.w[q] * spec_.F(y0 + dx * t);
    }
    pot += cell * 0.5 * delta;
  }
  return kin + pot - c_star_;
}

double EnergyModel::completing_squares_gap(const PLPath& u) const {
  const double g_hi = g_value(spec_, u.values.back());
  const double g_lo = g_value(spec_, u.values.front());
  return energy(u) + c_star_ - (g_hi - g_lo);
}

double EnergyModel::phi(const PLPath& u) const {
  const double delta = u.params.mesh();
  const GaussRule& r = gauss_rule(order_);
  double pot = 0.0;
  for (int k = 0; k < 2 * u.params.N; ++k) {
    const double y0 = u.values[k], dx = u.values[k + 1] - y0;
    double cell = 0.0;
    for (std::size_t q = 0; q < r.x.size(); ++q) {
      const double t = 0.5 * (1.0 + r.x[q]);
      cell += r.w[q] * spec_.F(y0 + dx * t);
    }
    pot += cell * 0.5 * delta;
  }
  return pot / u.params.epsilon;
}

namespace {

// shared middle-integral helper: per-cell Gauss-Legendre of f(s, u(s))
template <typename F>
double cells_integral(const PLPath& u, F&& f, int order = 8) {
  const GaussRule& r = gauss_rule(order);
  const double delta = u.params.mesh();
  double total = 0.0;
  for (int k = 0; k < 2 * u.params.N; ++k) {
    const double s0 = u.params.node(k);
    const double y0 = u.values[k], dx = u.values[k + 1] - y0;
    double cell = 0.0;
    for (std::size_t q = 0; q < r.x.size(); ++q) {
      const double t = 0.5 * (1.0 + r.x[q]);
      cell += r.w[q] * f(s0 + t * delta, y0 + dx * t);
    }
    total += cell * 0.5 * delta;
  }
  return total;
}

// first linear-interpolation zero crossing of the node values, NaN when none
double first_zero_crossing(const PLPath& u) {
  for (int k = 0; k + 1 < u.n_nodes(); ++k) {
    const double a = u.values[k], b = u.values[k + 1];
    if (a == 0.0) return u.params.node(k);
    if (a * b < 0.0) {
      const double t = a / (a - b);
      return u.params.node(k) + t * u.params.mesh();
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double residual_l2_sq(const PLPath& u, const InstantonProfile& p, double xi) {
  double mid = cells_integral(u, [&](double s, double y) {
    const double d = y - p.value(s - xi);
    return d * d;
  });
  const double L = u.params.half_length();
  const double cL = u.values.front(), cR = u.values.back();
  double tails = 0.0;
  if (cR == 1.0)
    tails += p.tail_sq_integral(L - xi);
  else
    return kInf;
  if (cL == -1.0)
    tails += p.tail_sq_integral(L + xi);
  else
    return kInf;
  return mid + tails;
}

double residual_h1_sq(const PLPath& u, const InstantonProfile& p, double xi) {
  const double l2 = residual_l2_sq(u, p, xi);
  if (!std::isfinite(l2)) return l2;
  const double delta = u.params.mesh();
  const GaussRule& r = gauss_rule(8);
  double dmid = 0.0;
  for (int k = 0; k < 2 * u.params.N; ++k) {
    const double s0 = u.params.node(k);
    const double slope = (u.values[k + 1] - u.values[k]) / delta;
    double cell = 0.0;
    for (std::size_t q = 0; q < r.x.size(); ++q) {
      const double s = s0 + 0.5 * (1.0 + r.x[q]) * delta;
      const double d = slope - p.derivative(s - xi);
      cell += r.w[q] * d * d;
    }
    dmid += cell * 0.5 * delta;
  }
  const double L = u.params.half_length();
  return l2 + dmid + p.tail_dsq_integral(L - xi) + p.tail_dsq_integral(L + xi);
}

double residual_inner_dm(const PLPath& u, const InstantonProfile& p, double xi) {
  double mid = cells_integral(u, [&](double s, double y) {
    return (y - p.value(s - xi)) * p.derivative(s - xi);
  });
  const double L = u.params.half_length();
  const double cL = u.values.front(), cR = u.values.back();
  // int (c - m) m' over a tail is exact in m: antiderivative c m - m^2/2
  const double mR = p.value(L - xi);
  const double right = cR * (1.0 - mR) - 0.5 * (1.0 - mR * mR);
  const double mL = p.value(-L - xi);
  const double left = cL * (mL + 1.0) - 0.5 * (mL * mL - 1.0);
  return mid + right + left;
}

namespace {

struct XiScan {
  double best_xi = 0.0;
  double best_val = kInf;
  bool multimodal = false;
};

template <typename F>
XiScan scan_and_refine(F&& obj, double lo, double hi, int coarse = 64, double tol = 1e-8) {
  std::vector<double> xs(coarse), vs(coarse);
  for (int i = 0; i < coarse; ++i) {
    xs[i] = lo + (hi - lo) * i / (coarse - 1);
    vs[i] = obj(xs[i]);
  }
  XiScan out;
  int n_minima = 0;
  int best_i = 0;
  for (int i = 0; i < coarse; ++i)
    if (vs[i] < vs[best_i]) best_i = i;
  for (int i = 1; i + 1 < coarse; ++i)
    if (vs[i] < vs[i - 1] && vs[i] < vs[i + 1]) ++n_minima;
  out.multimodal = n_minima > 1;
  const double step = (hi - lo) / (coarse - 1);
  const double a = std::max(lo, xs[best_i] - step);
  const double b = std::min(hi, xs[best_i] + step);
  out.best_xi = golden_min(obj, a, b, tol);
  out.best_val = obj(out.best_xi);
  return out;
}

}  // namespace

FermiCoords fermi_project(const PLPath& u, const InstantonProfile& p) {
  const double s0 = first_zero_crossing(u);
  if (!std::isfinite(s0))
    throw NoInterfaceError("fermi_project: path has no sign change, no bracket available");
  auto obj = [&](double xi) { return residual_l2_sq(u, p, xi); };
  const XiScan scan = scan_and_refine(obj, s0 - 5.0, s0 + 5.0);

  FermiCoords fc;
  fc.xi = scan.best_xi;
  fc.multimodal = scan.multimodal;
  fc.dist_l2 = std::sqrt(std::max(0.0, scan.best_val));
  fc.v_nodes.resize(u.n_nodes());
  for (int k = 0; k < u.n_nodes(); ++k)
    fc.v_nodes[k] = u.values[k] - p.value(u.params.node(k) - fc.xi);
  fc.normality_residual = residual_inner_dm(u, p, fc.xi);
  return fc;
}

namespace {

double linf_residual(const PLPath& u, const InstantonProfile& p, double xi) {
  const double delta = u.params.mesh();
  double worst = 0.0;
  const int probe = 8;
  for (int k = 0; k < 2 * u.params.N; ++k) {
    const double s0 = u.params.node(k);
    const double y0 = u.values[k], dx = u.values[k + 1] - y0;
    for (int q = 0; q <= probe; ++q) {
      const double t = static_cast<double>(q) / probe;
      const double d = std::abs(y0 + dx * t - p.value(s0 + t * delta - xi));
      worst = std::max(worst, d);
    }
  }
  const double L = u.params.half_length();
  const double cL = u.values.front(), cR = u.values.back();
  // monotone profile: tail sup is attained at the interval end
  worst = std::max(worst, std::abs(cR - p.value(L - xi)));
  worst = std::max(worst, std::abs(cR - 1.0));
  worst = std::max(worst, std::abs(cL - p.value(-L - xi)));
  worst = std::max(worst, std::abs(cL + 1.0));
  return worst;
}

double dist_to_constants(const PLPath& u, PathNorm norm) {
  // no interface: compare against the translate limits +-1
  double best = kInf;
  for (double sigma : {-1.0, 1.0}) {
    if (u.values.front() != sigma || u.values.back() != sigma) continue;
    double val;
    if (norm == PathNorm::L2) {
      val = std::sqrt(cells_integral(u, [&](double, double y) {
        const double d = y - sigma;
        return d * d;
      }));
    } else {
      val = 0.0;
      for (double y : u.values) val = std::max(val, std::abs(y - sigma));
    }
    best = std::min(best, val);
  }
  if (!std::isfinite(best)) {
    // mismatched constant tails: L2 distance diverges, Linf is still finite
    if (norm == PathNorm::Linf) {
      for (double sigma : {-1.0, 1.0}) {
        double val = 0.0;
        for (double y : u.values) val = std::max(val, std::abs(y - sigma));
        best = std::min(best, val);
      }
    }
  }
  return best;
}

}  // namespace

double dist_to_M(const PLPath& u, const InstantonProfile& p, PathNorm norm) {
  const double s0 = first_zero_crossing(u);
  if (!std::isfinite(s0)) return dist_to_constants(u, norm);
  if (norm == PathNorm::L2) {
    auto obj = [&](double xi) { return residual_l2_sq(u, p, xi); };
    const XiScan scan = scan_and_refine(obj, s0 - 5.0, s0 + 5.0);
    return std::sqrt(std::max(0.0, scan.best_val));
  }
  auto obj = [&](double xi) { return linf_residual(u, p, xi); };
  const XiScan scan = scan_and_refine(obj, s0 - 5.0, s0 + 5.0, 96, 1e-7);
  return scan.best_val;
}

double dist_h1(const PLPath& u, const InstantonProfile& p) {
  const double s0 = first_zero_crossing(u);
  const double center = std::isfinite(s0) ? s0 : 0.0;
  auto obj = [&](double xi) { return residual_h1_sq(u, p, xi); };
  const XiScan scan = scan_and_refine(obj, center - 5.0, center + 5.0);
  return std::sqrt(std::max(0.0, scan.best_val));
}

double quad_form(const InstantonProfile& p, double xi, const PLPath& v, int quad_order) {
  if (v.boundary != Boundary::Zero)
    throw std::domain_error("quad_form: v must have zero boundary data");
  const double delta = v.params.mesh();
  double kin = 0.0;
  for (int k = 0; k < 2 * v.params.N; ++k) {
    const double dv = v.values[k + 1] - v.values[k];
    kin += dv * dv / delta;
  }
  const double pot = cells_integral(
      v,
      [&](double s, double y) { return p.spec.d2F(p.value(s - xi)) * y * y; },
      quad_order);
  return kin + pot;
}

SpectralReport spectral_report(const InstantonProfile& p, double h, double T) {
  if (!(h <= 0.05)) throw std::invalid_argument("spectral_report: need h <= 0.05");
  if (!(T >= 15.0 / p.c2)) throw std::invalid_argument("spectral_report: need T >= 15/c2");

  const int n = static_cast<int>(std::lround(2.0 * T / h)) - 1;
  Tridiag A;
  A.diag.resize(n);
  A.off.assign(n - 1, -1.0 / (h * h));
  std::vector<double> g(n);  // discretized m'
  for (int i = 0; i < n; ++i) {
    const double x = -T + (i + 1) * h;
    A.diag[i] = 2.0 / (h * h) + p.spec.d2F(p.value(x));
    g[i] = p.derivative(x);
  }

  SpectralReport rep;
  rep.h = h;
  rep.T = T;
  rep.lambda0 = tridiag_eigenvalue(A, 0);
  rep.lambda1 = tridiag_eigenvalue(A, 1);

  // ground state by shifted inverse iteration, seeded with m'
  {
    const double shift = rep.lambda0 - 1e-6 * std::max(1.0, std::abs(rep.lambda1));
    const TridiagFactor f = tridiag_factor(A, shift);
    std::vector<double> x = g;
    for (int iter = 0; iter < 6; ++iter) {
      x = tridiag_solve(f, x);
      const double nrm = std::sqrt(dot(x, x));
      for (double& v : x) v /= nrm;
    }
    rep.eigvec0_alignment = std::abs(dot(x, g)) / std::sqrt(dot(g, g));
    rep.eigvec0 = x;
    rep.grid.resize(n);
    for (int i = 0; i < n; ++i) rep.grid[i] = -T + (i + 1) * h;
  }

  // constrained gap: inverse iteration for A restricted to g^perp, realized
  // by Lagrange-bordered solves of the shifted SPD system
  {
    const double c = 0.5;
    const TridiagFactor f = tridiag_factor(A, -c);
    const std::vector<double> Sg = tridiag_solve(f, g);
    const double gSg = dot(g, Sg);
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = (i % 2 == 0 ? 1.0 : 0.8) / (1.0 + i * h);
    const double gg = dot(g, g);
    for (int i = 0; i < n; ++i) x[i] -= dot(x, g) / gg * g[i];
    double rq_prev = 0.0;
    for (int iter = 0; iter < 2000; ++iter) {
      std::vector<double> y = tridiag_solve(f, x);
      const double mu = dot(g, y) / gSg;
      for (int i = 0; i < n; ++i) y[i] -= mu * Sg[i];
      const double nrm = std::sqrt(dot(y, y));
      for (double& v : y) v /= nrm;
      x = y;
      const std::vector<double> Ax = tridiag_apply(A, x);
      const double rq = dot(x, Ax);
      if (iter > 4 && std::abs(rq - rq_prev) < 1e-12 * std::max(1.0, std::abs(rq))) {
        rq_prev = rq;
        break;
      }
      rq_prev = rq;
    }
    rep.constrained_gap = rq_prev;
  }
  return rep;
}

double landscape_c0(const SpectralReport& rep, const PotentialSpec& spec) {
  double inf_d2 = 0.0;
  for (double u : probe_grid(-1.0, 1.0, 2001)) inf_d2 = std::min(inf_d2, spec.d2F(u));
  const double c5m = std::max(0.0, -inf_d2);
  const double c3 = rep.constrained_gap;
  return 0.5 * c3 / (1.0 + c3 + c5m);
}

LandscapeCheck landscape_check(const InstantonProfile& p, const SpectralReport& rep,
                               const PLPath& v, double delta1, int quad_order) {
  if (v.boundary != Boundary::Zero)
    throw std::domain_error("landscape_check: v must have zero boundary data");
  const ScaleParams& par = v.params;
  const double delta = par.mesh();

  // normal-direction precondition; project out the tangent component
  std::vector<double> g(par.n_nodes());
  for (int k = 0; k < par.n_nodes(); ++k) g[k] = p.derivative(par.node(k));
  auto l2ip = [&](const std::vector<double>& a, const std::vector<double>& b) {
    // exact PL inner product (mass-matrix weights)
    double s = 0.0;
    for (int k = 0; k < 2 * par.N; ++k)
      s += delta / 6.0 * (2 * a[k] * b[k] + a[k] * b[k + 1] + a[k + 1] * b[k] +
                          2 * a[k + 1] * b[k + 1]);
    return s;
  };
  PLPath w = v;
  const double vg = l2ip(w.values, g);
  const double gg2 = l2ip(g, g);
  const double vv = l2ip(w.values, w.values);
  if (vv > 0.0 && vg * vg > 0.81 * vv * gg2)
    throw std::domain_error("landscape_check: v is a tangent direction (parallel to m')");
  for (int k = 1; k < par.n_nodes() - 1; ++k) w.values[k] -= vg / gg2 * g[k];

  LandscapeCheck out;
  double kin = 0.0;
  for (int k = 0; k < 2 * par.N; ++k) {
    const double dv = w.values[k + 1] - w.values[k];
    kin += dv * dv / delta;
  }
  const double l2 = l2ip(w.values, w.values);
  out.v_h1 = std::sqrt(l2 + kin);
  if (out.v_h1 > delta1)
    throw std::domain_error("landscape_check: |v|_H1 exceeds the tube radius delta1");

  double vmax = 0.0;
  for (double y : w.values) vmax = std::max(vmax, std::abs(y));

  // H(m + v) through the energy functional; the energy of the sampled
  // profile itself carries the grid bias and is subtracted for the bounds
  EnergyModel model(p.spec, quad_order);
  PLPath u = zero_path(par, Boundary::FixedPlusMinus);
  PLPath base = u;
  for (int k = 1; k < par.n_nodes() - 1; ++k) {
    base.values[k] = p.value(par.node(k));
    u.values[k] = base.values[k] + w.values[k];
  }
  out.H = model.energy(u);
  out.H0 = model.energy(base);

  double sup_d3 = 0.0, sup_d2 = 1.0;
  for (double x : probe_grid(-1.0 - vmax, 1.0 + vmax, 2001)) {
    sup_d3 = std::max(sup_d3, std::abs(p.spec.d3F(x)));
    sup_d2 = std::max(sup_d2, std::abs(p.spec.d2F(x)));
  }
  out.cubic_envelope = sup_d3 / 6.0 * vmax * l2;
  const double c0 = landscape_c0(rep, p.spec);
  out.bound_lo = c0 * out.v_h1 * out.v_h1 - out.cubic_envelope;
  out.bound_hi = 0.5 * sup_d2 * out.v_h1 * out.v_h1 + out.cubic_envelope;
  const double mesh_slack = 1e-8 + delta * delta * (0.1 + out.v_h1);
  out.lower_ok = out.H - out.H0 >= out.bound_lo - mesh_slack;
  out.upper_ok = out.H - out.H0 <= out.bound_hi + mesh_slack;
  return out;
}

double xi_directional_derivative(const PLPath& u, const PLPath& h, const InstantonProfile& p,
                                 double tube_radius) {
  if (h.boundary != Boundary::Zero)
    throw std::domain_error("xi_directional_derivative: h must have zero boundary data");
  const FermiCoords fc = fermi_project(u, p);
  if (fc.dist_l2 > tube_radius)
    throw std::domain_error("xi_directional_derivative: u is outside the tube around M");
  const double xi = fc.xi;

  const double num = cells_integral(h, [&](double s, double y) {
    return p.derivative(s - xi) * y;
  });

  // <v, m''_xi>: cells plus exact tail terms via integration by parts
  double s_term = cells_integral(u, [&](double s, double y) {
    return (y - p.value(s - xi)) * p.spec.dF(p.value(s - xi));
  });
  const double L = u.params.half_length();
  const double cR = u.values.back(), cL = u.values.front();
  const double aR = L - xi, bL = -L - xi;
  s_term += -(cR - p.value(aR)) * p.derivative(aR) + p.tail_dsq_integral(aR);
  s_term += (cL - p.value(bL)) * p.derivative(bL) + p.tail_dsq_integral(-bL);

  const double dm2 = p.norm_dm_sq();
  const double denom = dm2 - s_term;
  if (std::abs(denom) < 0.1 * dm2)
    throw std::domain_error("xi_directional_derivative: near-caustic, denominator too small");
  return -num / denom;
}

}  // namespace kink
