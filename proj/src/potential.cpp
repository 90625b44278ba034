#include "kinklab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kinklab/quadrature.hpp"

namespace kink {

PotentialSpec quartic_potential() {
  PotentialSpec s;
  s.name = "quartic";
  s.F = [](double u) { double q = u * u - 1.0; return 0.5 * q * q; };
  s.dF = [](double u) { return 2.0 * u * (u * u - 1.0); };
  s.d2F = [](double u) { return 6.0 * u * u - 2.0; };
  s.d3F = [](double u) { return 12.0 * u; };
  // G(u) = int_0^u |1-t^2| dt, piecewise closed form
  s.closed_form_G = [](double u) {
    if (u >= -1.0 && u <= 1.0) return u - u * u * u / 3.0;
    const double sgn = u > 0 ? 1.0 : -1.0;
    const double a = std::abs(u);
    return sgn * (2.0 / 3.0 + (a * a * a / 3.0 - a + 2.0 / 3.0));
  };
  return s;
}

namespace {

std::vector<double> differentiate(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<double>(k));
  if (d.empty()) d.push_back(0.0);
  return d;
}

double horner(const std::vector<double>& c, double u) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * u + *it;
  return v;
}

}  // namespace

PotentialSpec potential_from_coeffs(const std::vector<double>& coeffs, const std::string& name) {
  if (coeffs.empty()) throw std::invalid_argument("potential coefficients are empty");
  const auto c1 = differentiate(coeffs);
  const auto c2 = differentiate(c1);
  const auto c3 = differentiate(c2);
  PotentialSpec s;
  s.name = name;
  s.F = [coeffs](double u) { return horner(coeffs, u); };
  s.dF = [c1](double u) { return horner(c1, u); };
  s.d2F = [c2](double u) { return horner(c2, u); };
  s.d3F = [c3](double u) { return horner(c3, u); };
  return s;
}

PotentialSpec lookup_potential(const std::string& name) {
  if (name == "quartic") return quartic_potential();
  throw std::invalid_argument("unknown potential name: " + name);
}

std::vector<double> probe_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

AssumptionReport assert_double_well(const PotentialSpec& spec, const std::vector<double>& probe) {
  if (probe.size() < 1000) throw std::invalid_argument("probe grid needs >= 1000 points");
  constexpr double kZeroTol = 1e-12;
  const double well_zone = 1e-3;  // probe points this close to a well may vanish

  AssumptionReport rep;
  auto fail = [](char c, std::string w) { return AssumptionClause{c, false, std::move(w)}; };
  auto pass = [](char c) { return AssumptionClause{c, true, {}}; };

  for (double u : probe) {
    if (!std::isfinite(spec.F(u))) {
      std::ostringstream os;
      os << "invalid potential: F(" << u << ") is not finite";
      throw std::invalid_argument(os.str());
    }
  }

  // (a) F >= 0, F(+-1) = 0, F > 0 away from the wells
  std::string wa;
  if (std::abs(spec.F(1.0)) > kZeroTol || std::abs(spec.F(-1.0)) > kZeroTol)
    wa = "F(+-1) != 0";
  for (double u : probe) {
    if (!wa.empty()) break;
    const double f = spec.F(u);
    if (f < -kZeroTol) {
      wa = "F(" + std::to_string(u) + ") < 0";
    } else if (std::min(std::abs(u - 1.0), std::abs(u + 1.0)) > well_zone && f <= kZeroTol) {
      wa = "F(" + std::to_string(u) + ") = 0 away from the wells";
    }
  }
  rep.clauses.push_back(wa.empty() ? pass('a') : fail('a', wa));

  // (b) dF sign changes only at {-1, 0, +1}; d2F(0) < 0, d2F(+-1) > 0
  std::string wb;
  if (!(spec.d2F(0.0) < 0.0)) wb = "F''(0) >= 0";
  if (wb.empty() && !(spec.d2F(1.0) > 0.0 && spec.d2F(-1.0) > 0.0)) wb = "F''(+-1) <= 0";
  if (wb.empty()) {
    const double zero_zone = 1e-2;
    for (std::size_t i = 0; i + 1 < probe.size(); ++i) {
      const double a = probe[i], b = probe[i + 1];
      if (spec.dF(a) * spec.dF(b) < 0.0) {
        const double mid = 0.5 * (a + b);
        const double d = std::min({std::abs(mid - 1.0), std::abs(mid), std::abs(mid + 1.0)});
        if (d > zero_zone) {
          wb = "F' changes sign near u = " + std::to_string(mid);
          break;
        }
      }
    }
  }
  rep.clauses.push_back(wb.empty() ? pass('b') : fail('b', wb));

  // (c) symmetry
  std::string wc;
  for (double u : probe) {
    if (std::abs(spec.F(u) - spec.F(-u)) > kZeroTol) {
      wc = "F(" + std::to_string(u) + ") != F(" + std::to_string(-u) + ")";
      break;
    }
  }
  rep.clauses.push_back(wc.empty() ? pass('c') : fail('c', wc));

  rep.all_pass = true;
  for (const auto& c : rep.clauses) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

double g_value_quadrature(const PotentialSpec& spec, double u, double abs_tol) {
  if (!std::isfinite(u)) throw std::invalid_argument("g_value: u must be finite");
  if (u == 0.0) return 0.0;
  auto integrand = [&spec](double t) { return std::sqrt(std::max(0.0, 2.0 * spec.F(t))); };
  // split at the wells: sqrt(2F) is only C^1 there
  std::vector<double> cuts{0.0};
  for (double w : {-1.0, 1.0})
    if ((w > 0.0 && w < u) || (w < 0.0 && w > u)) cuts.push_back(w);
  cuts.push_back(u);
  std::sort(cuts.begin(), cuts.end(), [&](double a, double b) { return u > 0 ? a < b : a > b; });
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate_adaptive(integrand, cuts[i], cuts[i + 1], abs_tol / (cuts.size() - 1));
  return total;
}

double g_value(const PotentialSpec& spec, double u) {
  if (spec.closed_form_G) return spec.closed_form_G(u);
  return g_value_quadrature(spec, u);
}

double surface_tension(const PotentialSpec& spec) {
  return g_value(spec, 1.0) - g_value(spec, -1.0);
}

namespace {

// cubic Hermite for the tapered derivative on [R, R+W]:
// p(0)=a0 with slope m0, p(W)=a0/2 with slope 0
struct Taper {
  double R, W, a0, m0;
  double p(double t) const {
    const double s = t / W;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    return a0 * h00 + m0 * W * h10 + 0.5 * a0 * h01;
  }
  double dp(double t) const {
    const double s = t / W;
    const double dh00 = 6 * s * (s - 1) / W;
    const double dh10 = (1 - 4 * s + 3 * s * s);
    const double dh01 = 6 * s * (1 - s) / W;
    return a0 * dh00 + m0 * dh10 + 0.5 * a0 * dh01;
  }
  double ip(double t) const {  // int_0^t p
    const double s = t / W;
    const double s2 = s * s, s3 = s2 * s, s4 = s2 * s2;
    const double I00 = s - s3 + 0.5 * s4;               // int (1+2s)(1-s)^2
    const double I10 = s2 / 2 - 2.0 * s3 / 3 + s4 / 4;  // int s(1-s)^2
    const double I01 = s3 - 0.5 * s4;                   // int s^2(3-2s)
    return W * (a0 * I00 + m0 * W * I10 + 0.5 * a0 * I01);
  }
};

}  // namespace

CutoffPotential cutoff(const PotentialSpec& spec, double cut_radius, double blend_width) {
  if (cut_radius < 2.0)
    throw std::invalid_argument("cutoff: cut_radius must be >= 2 (>= max well location)");
  if (blend_width <= 0.0) throw std::invalid_argument("cutoff: blend_width must be positive");

  const double R = cut_radius, W = blend_width;
  const Taper taper{R, W, spec.dF(R), spec.d2F(R)};
  const double FR = spec.F(R);
  const double slope_out = 0.5 * taper.a0;
  const double F_exit = FR + taper.ip(W);

  PotentialSpec base = spec;  // capture by value in the lambdas below
  PotentialSpec mod;
  mod.name = spec.name + "|cut" + std::to_string(cut_radius);
  mod.F = [base, taper, R, W, FR, F_exit, slope_out](double u) {
    const double a = std::abs(u);
    if (a <= R) return base.F(u);
    if (a <= R + W) return FR + taper.ip(a - R);
    return F_exit + slope_out * (a - R - W);
  };
  mod.dF = [base, taper, R, W, slope_out](double u) {
    const double a = std::abs(u);
    const double sgn = u >= 0 ? 1.0 : -1.0;
    if (a <= R) return base.dF(u);
    if (a <= R + W) return sgn * taper.p(a - R);
    return sgn * slope_out;
  };
  mod.d2F = [base, taper, R, W](double u) {
    const double a = std::abs(u);
    if (a <= R) return base.d2F(u);
    if (a <= R + W) return taper.dp(a - R);
    return 0.0;
  };
  mod.d3F = [base, taper, R, W](double u) {
    const double a = std::abs(u);
    const double sgn = u >= 0 ? 1.0 : -1.0;
    if (a <= R) return base.d3F(u);
    if (a <= R + W) {
      const double s = (a - R) / W;
      const double d2h00 = (12 * s - 6) / (W * W);
      const double d2h10 = (6 * s - 4) / W;
      const double d2h01 = (6 - 12 * s) / (W * W);
      return sgn * (taper.a0 * d2h00 + taper.m0 * W * d2h10 + 0.5 * taper.a0 * d2h01);
    }
    return 0.0;
  };
  mod.closed_form_G = {};  // blend has no closed form

  return CutoffPotential{spec, cut_radius, blend_width, std::move(mod)};
}

}  // namespace kink
