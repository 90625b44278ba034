#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "kinklab/energy.hpp"
#include "kinklab/instanton.hpp"
#include "kinklab/potential.hpp"
#include "kinklab/rng.hpp"

#ifdef KINKLAB_HAVE_EIGEN
#include <Eigen/Eigenvalues>
#endif

using namespace kink;

namespace {

const InstantonProfile& quartic_profile() {
  static InstantonProfile p = solve_profile(quartic_potential());
  return p;
}

const EnergyModel& quartic_model() {
  static EnergyModel m(quartic_potential());
  return m;
}

// profile sampled on the grid with exact +-1 boundary data
PLPath kink_path(const ScaleParams& par, const InstantonProfile& p, double xi = 0.0) {
  PLPath u = zero_path(par, Boundary::FixedPlusMinus);
  for (int k = 1; k < par.n_nodes() - 1; ++k) u.values[k] = p.value(par.node(k) - xi);
  return u;
}

PLPath ramp_path() {
  // nodes at multiples of 1/2 on [-2,2]; u(s) = clamp(s, -1, 1)
  const auto par = make_params(0.25, 0.5, 0.2, 0.7, 4);
  PLPath u = zero_path(par, Boundary::FixedPlusMinus);
  for (int k = 0; k < par.n_nodes(); ++k)
    u.values[k] = std::clamp(par.node(k), -1.0, 1.0);
  return u;
}

}  // namespace

TEST_CASE("energy of the linear ramp is exactly 1/5") {
  // 1 + 8/15 - 4/3 by exact polynomial integration
  const auto u = ramp_path();
  CHECK(quartic_model().energy(u) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(quartic_model().completing_squares_gap(u) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("energy of the discretized instanton is small and shrinks with N") {
  const auto& p = quartic_profile();
  const auto coarse = make_params(0.05, 0.4, 0.25, 0.62, 128);
  const auto fine = make_params(0.05, 0.4, 0.25, 0.62, 512);
  const PLPath uc{coarse, Boundary::FixedPlusMinus, discretize_profile(p, coarse, 0.0).values};
  const PLPath uf{fine, Boundary::FixedPlusMinus, discretize_profile(p, fine, 0.0).values};
  const double Hc = quartic_model().energy(uc);
  const double Hf = quartic_model().energy(uf);
  CHECK(Hf <= 1e-3);
  CHECK(Hf < Hc);
  CHECK(quartic_model().completing_squares_gap(uf) <= 1e-3);
}

TEST_CASE("single-cell step pays 2/delta kinetic energy") {
  const auto par = make_params(0.25, 0.5, 0.2, 0.7, 4);
  PLPath u = zero_path(par, Boundary::FixedPlusMinus);
  for (int k = 0; k < par.n_nodes(); ++k) u.values[k] = par.node(k) < 0 ? -1.0 : 1.0;
  const double delta = par.mesh();
  // jump cell: kinetic (2)^2/(2 delta); potential delta/2 * int_{-1}^{1} F = 4 delta/15
  const double expected = 2.0 / delta + 4.0 * delta / 15.0 - 4.0 / 3.0;
  CHECK(quartic_model().energy(u) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("zero-boundary paths are rejected by energy") {
  const auto par = make_params(0.25, 0.5, 0.2, 0.7, 4);
  CHECK_THROWS_AS(quartic_model().energy(zero_path(par, Boundary::Zero)), std::domain_error);
}

TEST_CASE("completing squares never goes negative on random paths") {
  const auto par = make_params(0.3, 0.4, 0.2, 0.62, 8);
  RngStream rng(2024);
  for (int trial = 0; trial < 10000; ++trial) {
    PLPath u = zero_path(par, Boundary::FixedPlusMinus);
    for (int k = 1; k < par.n_nodes() - 1; ++k) u.values[k] = rng.uniform(-2.5, 2.5);
    CHECK(quartic_model().completing_squares_gap(u) >= -1e-9);
  }
}

TEST_CASE("node roll leaves the energy unchanged") {
  const auto par = make_params(0.25, 0.5, 0.2, 0.7, 8);
  PLPath u = zero_path(par, Boundary::FixedPlusMinus);
  // interior profile flat at the ends so a one-node roll stays admissible
  const std::vector<double> vals{-1, -1, -1, -0.6, 0.1, 0.8, 1, 1, 1};
  std::vector<double> rolled{-1, -1, -1, -1, -0.6, 0.1, 0.8, 1, 1};
  for (int k = 0; k < par.n_nodes(); ++k) u.values[k] = vals[k];
  PLPath v = u;
  v.values = rolled;
  CHECK(std::abs(quartic_model().energy(u) - quartic_model().energy(v)) < 1e-13);
}

TEST_CASE("fermi projection recovers translates") {
  const auto& p = quartic_profile();
  const auto par = make_params(0.0625, 0.5, 0.2, 0.7, 256);

  const auto fc = fermi_project(kink_path(par, p, 0.5), p);
  CHECK(fc.xi == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(fc.dist_l2 < 1e-3);
  CHECK_FALSE(fc.multimodal);

  const auto fc0 = fermi_project(kink_path(par, p, 0.0), p);
  CHECK(std::abs(fc0.xi) < 1e-6);
  for (double v : fc0.v_nodes) CHECK(std::abs(v) < 1e-3);

  // projecting m_xi recovers xi across the admissible shift window; the
  // +-1 node data at the interval ends shift the whole-line minimizer by
  // (1 - m(L - |xi|))^2 / (2 |m'|^2), tiny inside the window
  const auto parw = make_params(0.0625, 0.5, 0.345, 0.75, 256);
  const double w = parw.shift_window();
  CHECK(w > 0.3);
  for (double xi : {-0.95 * w, -0.2, 0.15, 0.95 * w}) {
    const auto f = fermi_project(kink_path(parw, p, xi), p);
    CHECK(std::abs(f.xi - xi) <= 1e-6);
  }
  for (double xi : {-1.8, 1.2, 2.0}) {
    const auto f = fermi_project(kink_path(par, p, xi), p);
    CHECK(std::abs(f.xi - xi) <= 1e-3);
  }
}

TEST_CASE("fermi projection of a normal perturbation") {
  const auto& p = quartic_profile();
  const auto par = make_params(0.0625, 0.5, 0.2, 0.7, 256);
  PLPath u = kink_path(par, p);
  // m'' is L2-orthogonal to m'
  for (int k = 1; k < par.n_nodes() - 1; ++k)
    u.values[k] += 0.01 * p.second_derivative(par.node(k));
  const auto fc = fermi_project(u, p);
  CHECK(std::abs(fc.xi) < 1e-3);
  CHECK(std::abs(fc.normality_residual) <= 1e-8);

  // dense-scan oracle agrees on the minimizer
  double best_xi = 0, best = 1e300;
  for (int i = 0; i <= 4000; ++i) {
    const double xi = -0.5 + i / 4000.0;
    const double d = residual_l2_sq(u, p, xi);
    if (d < best) {
      best = d;
      best_xi = xi;
    }
  }
  CHECK(fc.xi == doctest::Approx(best_xi).epsilon(5e-4));
}

TEST_CASE("paths without an interface are rejected") {
  const auto& p = quartic_profile();
  const auto par = make_params(0.25, 0.5, 0.2, 0.7, 8);
  PLPath u{par, Boundary::FixedPlusMinus, std::vector<double>(par.n_nodes(), 0.5)};
  CHECK_THROWS_AS(fermi_project(u, p), NoInterfaceError);
}

TEST_CASE("distance to the minimizer curve") {
  const auto& p = quartic_profile();
  const auto par = make_params(0.04, 0.5, 0.2, 0.7, 320);

  CHECK(dist_to_M(kink_path(par, p, 0.2), p, PathNorm::L2) < 1e-3);
  CHECK(dist_to_M(kink_path(par, p, 0.2), p, PathNorm::Linf) < 1e-3);

  // constant shift: Linf distance stays within the shift size (up to the
  // forced +-1 interpolation at the interval ends)
  PLPath shifted = kink_path(par, p);
  for (auto& v : shifted.values) v += 0.05;
  CHECK(dist_to_M(shifted, p, PathNorm::Linf) <= 0.0502);

  // anti-kink is far from every translate
  PLPath anti{par, Boundary::FixedPlusMinus, {}};
  anti.values.resize(par.n_nodes());
  for (int k = 0; k < par.n_nodes(); ++k) anti.values[k] = -p.value(par.node(k));
  CHECK(dist_to_M(anti, p, PathNorm::Linf) >= 1.0);
}

TEST_CASE("quadratic form at the kink") {
  const auto& p = quartic_profile();
  const auto par = make_params(0.04, 0.5, 0.2, 0.7, 256);

  // v = m' spans the kernel of A
  PLPath v = zero_path(par, Boundary::Zero);
  for (int k = 1; k < par.n_nodes() - 1; ++k) v.values[k] = p.derivative(par.node(k));
  CHECK(std::abs(quad_form(p, 0.0, v)) < 1e-3);

  // v = m'' is orthogonal to m': Rayleigh quotient above the gap
  PLPath w = zero_path(par, Boundary::Zero);
  double wl2 = 0.0;
  for (int k = 1; k < par.n_nodes() - 1; ++k) w.values[k] = p.second_derivative(par.node(k));
  for (int k = 0; k < 2 * par.N; ++k) {
    const double a = w.values[k], b = w.values[k + 1];
    wl2 += par.mesh() / 6.0 * (2 * a * a + 2 * a * b + 2 * b * b);
  }
  // exact values for tanh: <m'', A m''> = 384/105, |m''|^2 = 16/15
  const double qf = quad_form(p, 0.0, w);
  CHECK(qf == doctest::Approx(384.0 / 105.0).epsilon(1e-3));
  CHECK(wl2 == doctest::Approx(16.0 / 15.0).epsilon(1e-3));
  CHECK(qf >= 2.95 * wl2);

  // single far-tail hat: |e'|^2 + F''(1) |e|^2
  PLPath hat = zero_path(par, Boundary::Zero);
  hat.values[par.n_nodes() - 8] = 0.3;
  const double delta = par.mesh();
  const double expected = 0.09 * (2.0 / delta) + 4.0 * 0.09 * (2.0 * delta / 3.0);
  CHECK(quad_form(p, 0.0, hat) == doctest::Approx(expected).epsilon(1e-2));
}

TEST_CASE("quad_form matches the second directional derivative of the energy") {
  const auto& p = quartic_profile();
  const auto par = make_params(0.04, 0.5, 0.2, 0.7, 512);
  RngStream rng(7);
  PLPath v = zero_path(par, Boundary::Zero);
  for (int k = 1; k < par.n_nodes() - 1; ++k)
    v.values[k] = rng.uniform(-1.0, 1.0) * std::exp(-0.2 * std::abs(par.node(k)));

  const PLPath base = kink_path(par, p);
  const double t = 1e-4;
  PLPath up = base, dn = base;
  for (int k = 1; k < par.n_nodes() - 1; ++k) {
    up.values[k] += t * v.values[k];
    dn.values[k] -= t * v.values[k];
  }
  const auto& model = quartic_model();
  const double fd =
      (model.energy(up) - 2.0 * model.energy(base) + model.energy(dn)) / (t * t);
  CHECK(fd == doctest::Approx(quad_form(p, 0.0, v)).epsilon(1e-3));
}

TEST_CASE("spectral report for the quartic") {
  const auto& p = quartic_profile();
  const auto rep = spectral_report(p, 0.01, 20.0);
  CHECK(std::abs(rep.lambda0) <= 1e-3);
  CHECK(rep.lambda1 == doctest::Approx(3.0).epsilon(2e-3));
  CHECK(rep.eigvec0_alignment >= 0.999);
  CHECK(rep.constrained_gap == doctest::Approx(3.0).epsilon(0.02));
  CHECK(rep.lambda0 <= rep.lambda1);
  CHECK(rep.constrained_gap > 0.0);

  CHECK_THROWS(spectral_report(p, 0.2, 20.0));
  CHECK_THROWS(spectral_report(p, 0.01, 3.0));
}

#ifdef KINKLAB_HAVE_EIGEN
TEST_CASE("bisection eigenvalues agree with a dense solver") {
  const auto& p = quartic_profile();
  const double h = 0.02, T = 16.0;
  const int n = static_cast<int>(std::lround(2 * T / h)) - 1;
  Eigen::VectorXd diag(n), off(n - 1);
  for (int i = 0; i < n; ++i) {
    const double x = -T + (i + 1) * h;
    diag[i] = 2.0 / (h * h) + p.spec.d2F(p.value(x));
    if (i + 1 < n) off[i] = -1.0 / (h * h);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  const auto rep = spectral_report(p, h, T);
  CHECK(rep.lambda0 == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-9));
  CHECK(rep.lambda1 == doctest::Approx(es.eigenvalues()[1]).epsilon(1e-9));
}
#endif

TEST_CASE("energy landscape sandwich") {
  const auto& p = quartic_profile();
  const auto rep = spectral_report(p, 0.01, 20.0);
  const auto par = make_params(0.04, 0.5, 0.2, 0.7, 256);

  // v = 0: H coincides with the grid baseline, trivially inside the bounds
  {
    const auto chk = landscape_check(p, rep, zero_path(par, Boundary::Zero));
    CHECK(chk.lower_ok);
    CHECK(chk.upper_ok);
    CHECK(chk.H == chk.H0);
    CHECK(std::abs(chk.H) < 1e-4);
  }

  // normal perturbation of moderate size
  {
    PLPath v = zero_path(par, Boundary::Zero);
    double h1 = 0.0;
    for (int k = 1; k < par.n_nodes() - 1; ++k) v.values[k] = p.second_derivative(par.node(k));
    for (int k = 0; k < 2 * par.N; ++k) {
      const double a = v.values[k], b = v.values[k + 1];
      h1 += par.mesh() / 6.0 * (2 * a * a + 2 * a * b + 2 * b * b);
      h1 += (b - a) * (b - a) / par.mesh();
    }
    for (int k = 1; k < par.n_nodes() - 1; ++k) v.values[k] *= 0.05 / std::sqrt(h1);
    const auto chk = landscape_check(p, rep, v);
    CHECK(chk.lower_ok);
    CHECK(chk.upper_ok);
    CHECK(chk.H > 0.0);
  }

  // tangent direction rejected
  {
    PLPath v = zero_path(par, Boundary::Zero);
    for (int k = 1; k < par.n_nodes() - 1; ++k)
      v.values[k] = 0.05 * p.derivative(par.node(k));
    CHECK_THROWS_AS(landscape_check(p, rep, v), std::domain_error);
  }

  // out of tube
  {
    PLPath v = zero_path(par, Boundary::Zero);
    for (int k = 1; k < par.n_nodes() - 1; ++k)
      v.values[k] = 0.5 * p.second_derivative(par.node(k));
    CHECK_THROWS_AS(landscape_check(p, rep, v), std::domain_error);
  }
}

TEST_CASE("xi directional derivative") {
  const auto& p = quartic_profile();
  const auto par = make_params(0.0625, 0.5, 0.2, 0.7, 256);
  const PLPath u0 = kink_path(par, p);

  // h = m': derivative is -1
  PLPath hm = zero_path(par, Boundary::Zero);
  for (int k = 1; k < par.n_nodes() - 1; ++k) hm.values[k] = p.derivative(par.node(k));
  CHECK(xi_directional_derivative(u0, hm, p) == doctest::Approx(-1.0).epsilon(1e-3));

  // h orthogonal to m': derivative vanishes
  PLPath hn = zero_path(par, Boundary::Zero);
  for (int k = 1; k < par.n_nodes() - 1; ++k) hn.values[k] = p.second_derivative(par.node(k));
  CHECK(std::abs(xi_directional_derivative(u0, hn, p)) < 1e-6);

  // generic case against the finite-difference oracle
  PLPath u = u0;
  RngStream rng(11);
  for (int k = 1; k < par.n_nodes() - 1; ++k)
    u.values[k] += 0.02 * rng.uniform(-1, 1) * std::exp(-0.3 * std::abs(par.node(k)));
  PLPath h = zero_path(par, Boundary::Zero);
  for (int k = 1; k < par.n_nodes() - 1; ++k)
    h.values[k] = rng.uniform(-1, 1) * std::exp(-0.2 * std::abs(par.node(k)));

  const double t = 1e-4;
  PLPath up = u, dn = u;
  for (int k = 1; k < par.n_nodes() - 1; ++k) {
    up.values[k] += t * h.values[k];
    dn.values[k] -= t * h.values[k];
  }
  const double fd = (fermi_project(up, p).xi - fermi_project(dn, p).xi) / (2 * t);
  const double an = xi_directional_derivative(u, h, p);
  CHECK(an == doctest::Approx(fd).epsilon(1e-4));
}

TEST_CASE("hat-embedding inequality") {
  // Euclidean norm of hat inner products <= 2 sqrt(delta) |g'|_L2
  const auto par = make_params(0.2, 0.4, 0.2, 0.62, 24);
  const double L = par.half_length(), delta = par.mesh();
  RngStream rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> amp(6), phase(6);
    for (int j = 0; j < 6; ++j) {
      amp[j] = rng.uniform(-1, 1);
      phase[j] = rng.uniform(0, 2 * M_PI);
    }
    auto grad = [&](double s) {
      double v = 0.0;
      for (int j = 0; j < 6; ++j) v += amp[j] * std::sin((j + 1) * M_PI * s / L + phase[j]);
      return v;
    };
    double norm_sq = 0.0, hat_sq = 0.0;
    const int q = 64;
    for (int i = 0; i < 2 * par.N * q; ++i) {
      const double s = -L + (i + 0.5) * delta / q;
      norm_sq += grad(s) * grad(s) * delta / q;
    }
    for (int k = 1; k < par.n_nodes() - 1; ++k) {
      double ip = 0.0;
      for (int i = 0; i < 2 * q; ++i) {
        const double s = par.node(k - 1) + (i + 0.5) * delta / q;
        const double hat = 1.0 - std::abs(s - par.node(k)) / delta;
        ip += hat * grad(s) * delta / q;
      }
      hat_sq += ip * ip;
    }
    CHECK(std::sqrt(hat_sq) <= 2.0 * std::sqrt(delta) * std::sqrt(norm_sq) * (1 + 1e-9));
  }
}

TEST_CASE("rough lower bound away from the curve") {
  const auto& p = quartic_profile();
  const auto rep = spectral_report(p, 0.02, 16.0);
  const double c0 = landscape_c0(rep, p.spec);
  const auto par = make_params(0.04, 0.5, 0.2, 0.7, 48);
  RngStream rng(99);
  const auto& model = quartic_model();

  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    PLPath u = kink_path(par, p);
    std::vector<double> v(par.n_nodes(), 0.0);
    for (int k = 1; k < par.n_nodes() - 1; ++k)
      v[k] = rng.uniform(-1, 1) * std::exp(-0.25 * std::abs(par.node(k)));
    // normalize the perturbation into the [delta0/2, delta0] shell
    double h1 = 0.0;
    for (int k = 0; k < 2 * par.N; ++k) {
      const double a = v[k], b = v[k + 1];
      h1 += par.mesh() / 6.0 * (2 * a * a + 2 * a * b + 2 * b * b);
      h1 += (b - a) * (b - a) / par.mesh();
    }
    const double target = rng.uniform(0.1, 0.2);
    for (int k = 1; k < par.n_nodes() - 1; ++k)
      u.values[k] += v[k] * target / std::sqrt(h1);

    const double d = dist_h1(u, p);
    if (d < 0.05) continue;
    if (model.energy(u) < c0 * d * d - 1e-9) ++violations;
  }
  CHECK(violations == 0);
}
