#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "kinklab/instanton.hpp"
#include "kinklab/potential.hpp"

using namespace kink;

namespace {

const InstantonProfile& quartic_profile() {
  static InstantonProfile p = solve_profile(quartic_potential());
  return p;
}

// least-squares slope of y against x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("quartic profile matches tanh to 1e-8 on [-8,8]") {
  const auto& p = quartic_profile();
  double worst = 0.0;
  for (int i = 0; i <= 32000; ++i) {
    const double s = -8.0 + 16.0 * i / 32000.0;
    worst = std::max(worst, std::abs(p.value(s) - std::tanh(s)));
  }
  CHECK(worst <= 1e-8);
  CHECK(p.value(0.0) == 0.0);
  CHECK(p.c2 == doctest::Approx(2.0).epsilon(1e-14));  // sqrt(F''(1))
  CHECK(p.T_tab == doctest::Approx(20.0));
}

TEST_CASE("profile translation") {
  const auto& p = quartic_profile();
  CHECK(profile_at(p, 1.0, 0.0) == doctest::Approx(0.7615941559557649).epsilon(1e-9));
  CHECK(profile_at(p, 0.7, 0.7) == 0.0);
  CHECK(profile_at(p, 1.25 + 0.5, 0.5) == profile_at(p, 1.25, 0.0));
}

TEST_CASE("ODE residual stays below 10x solver tolerance") {
  const auto& p = quartic_profile();
  CHECK(p.max_ode_residual() <= 10.0 * std::max(p.solver_tol, 1e-9));
}

TEST_CASE("antisymmetry and monotonicity") {
  const auto& p = quartic_profile();
  for (double s : {0.3, 1.7, 4.2, 9.0}) {
    CHECK(p.value(-s) == doctest::Approx(-p.value(s)).epsilon(1e-12));
  }
  double prev = p.value(-12.0);
  for (int i = 1; i <= 600; ++i) {
    const double m = p.value(-12.0 + i * 0.04);
    CHECK(m >= prev - 1e-15);
    prev = m;
  }
}

TEST_CASE("tail envelope and tail fit") {
  const auto& p = quartic_profile();
  for (int i = 0; i <= 400; ++i) {
    const double s = i * 0.05;
    CHECK(p.one_minus(s) <= p.c1 * std::exp(-p.c2 * s) * (1 + 1e-9));
    CHECK(std::abs(p.derivative(s)) <= p.c1 * p.c2 * std::exp(-p.c2 * s) * (1 + 1e-9));
  }
  // log(1 - m) is affine with slope -c2 on [T_tab/2, T_tab] ...
  std::vector<double> xs, ys;
  for (double s = p.T_tab / 2; s <= p.T_tab; s += 0.25) {
    xs.push_back(s);
    ys.push_back(std::log(p.one_minus(s)));
  }
  CHECK(fit_slope(xs, ys) == doctest::Approx(-p.c2).epsilon(0.02));
  // ... and already on the resolved part of the table
  xs.clear();
  ys.clear();
  for (double s = 5.0; s <= 12.0; s += 0.25) {
    xs.push_back(s);
    ys.push_back(std::log(p.one_minus(s)));
  }
  CHECK(fit_slope(xs, ys) == doctest::Approx(-p.c2).epsilon(0.02));
}

TEST_CASE("degenerate well curvature is rejected") {
  PotentialSpec s;
  s.name = "flat-well";
  s.F = [](double u) { double q = u * u - 1; return 0.25 * q * q * q * q; };
  s.dF = [](double u) { double q = u * u - 1; return 2.0 * u * q * q * q; };
  s.d2F = [](double u) { double q = u * u - 1; return 2.0 * q * q * (q + 6.0 * u * u); };
  s.d3F = [](double) { return 0.0; };
  CHECK_THROWS(solve_profile(s));
}

TEST_CASE("cutoff profile core, plateau and blend") {
  const auto& p = quartic_profile();
  const auto params = make_params(0.1, 0.4, 0.2, 0.62, 32);
  const auto view = cutoff_profile(p, params, 0.0);
  const double a = params.cutoff_radius();

  for (double s : {0.0, 0.3, -0.9, a * 0.99}) {
    CHECK(view.value(s) == p.value(s));
  }
  CHECK(view.value(a + 1.0) == 1.0);
  CHECK(view.value(a + 2.5) == 1.0);
  CHECK(view.value(-a - 1.0) == -1.0);

  // monotone blend with the paper's slope bound
  double prev = view.value(a);
  for (int i = 1; i <= 200; ++i) {
    const double s = a + i / 200.0;
    const double v = view.value(s);
    CHECK(v >= prev - 1e-15);
    CHECK(v <= 1.0 + 1e-15);
    CHECK(v >= p.value(s) - 1e-12);  // m <= m^eps <= 1 on the right blend
    CHECK(std::abs(view.derivative(s)) <= view.slope_bound() * (1 + 1e-9));
    prev = v;
  }

  // window is empty here, so any nonzero shift is rejected
  CHECK(params.shift_window() == 0.0);
  CHECK_THROWS_AS(cutoff_profile(p, params, 0.5), std::domain_error);
}

TEST_CASE("discretized profile") {
  const auto& p = quartic_profile();
  const auto params = make_params(0.1, 0.4, 0.2, 0.62, 32);
  const auto d = discretize_profile(p, params, 0.0);
  const auto view = cutoff_profile(p, params, 0.0);

  CHECK(static_cast<int>(d.values.size()) == params.n_nodes());
  CHECK(d.values.front() == -1.0);
  CHECK(d.values.back() == 1.0);

  // first node right of zero carries tanh(delta)
  const double delta = params.mesh();
  CHECK(d.values[params.N + 1] == doctest::Approx(std::tanh(delta)).epsilon(1e-9));

  for (int k = 1; k < params.n_nodes() - 1; ++k) {
    CHECK(d.values[k] == view.value(params.node(k)));
    CHECK(d.values[k] >= d.values[k - 1] - 1e-15);
    if (std::abs(params.node(k)) >= params.cutoff_radius() + 1.0) {
      CHECK(std::abs(d.values[k]) == 1.0);
    }
  }
}

TEST_CASE("discretization error norms shrink at the lemma rates") {
  const auto& p = quartic_profile();
  // N ladder at fixed epsilon: l2 ~ N^-2, h1 ~ N^-1 (epsilon small enough
  // that the cutoff tail sits far below the interpolation error)
  std::vector<double> logN, log_l2, log_h1;
  for (int N : {8, 16, 32, 64}) {
    const auto params = make_params(0.02, 0.45, 0.44, 0.75, N);
    const auto norms = profile_error_norms(p, params, 0.0);
    logN.push_back(std::log(N));
    log_l2.push_back(std::log(norms.l2_disc));
    log_h1.push_back(std::log(norms.h1_disc));
  }
  CHECK(fit_slope(logN, log_l2) == doctest::Approx(-2.0).epsilon(0.075));
  CHECK(fit_slope(logN, log_h1) == doctest::Approx(-1.0).epsilon(0.15));

  // refining N by 8 shrinks the L2 error by about 64x
  {
    const auto c = make_params(0.02, 0.45, 0.44, 0.75, 16);
    const auto f = make_params(0.02, 0.45, 0.44, 0.75, 128);
    const double ratio = profile_error_norms(p, c, 0.0).l2_disc /
                         profile_error_norms(p, f, 0.0).l2_disc;
    CHECK(ratio > 40.0);
    CHECK(ratio < 100.0);
  }

  // epsilon ladder: cutoff error ~ exp(-c2 eps^-gamma1)
  std::vector<double> radii, log_cut;
  for (double eps : {0.1, 0.05, 0.02, 0.01}) {
    const auto params = make_params(eps, 0.4, 0.25, 0.66);
    const auto norms = profile_error_norms(p, params, 0.0);
    radii.push_back(params.cutoff_radius());
    log_cut.push_back(std::log(norms.l2_cutoff));
  }
  CHECK(fit_slope(radii, log_cut) == doctest::Approx(-p.c2).epsilon(0.15));
}
