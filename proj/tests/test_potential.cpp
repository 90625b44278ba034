#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kinklab/potential.hpp"
#include "kinklab/quadrature.hpp"

using namespace kink;

TEST_CASE("quartic passes the double-well assumptions") {
  const auto spec = quartic_potential();
  const auto rep = assert_double_well(spec, probe_grid());
  CHECK(rep.all_pass);
  for (const auto& c : rep.clauses) CHECK(c.pass);
}

TEST_CASE("single well F = u^2 fails clause (a)") {
  PotentialSpec s;
  s.name = "single";
  s.F = [](double u) { return u * u; };
  s.dF = [](double u) { return 2 * u; };
  s.d2F = [](double) { return 2.0; };
  s.d3F = [](double) { return 0.0; };
  const auto rep = assert_double_well(s, probe_grid());
  CHECK_FALSE(rep.all_pass);
  CHECK_FALSE(rep.clauses[0].pass);
  CHECK(!rep.clauses[0].witness.empty());
}

TEST_CASE("tilted quartic fails the symmetry clause") {
  PotentialSpec s;
  s.name = "tilted";
  s.F = [](double u) { double q = u * u - 1; return 0.5 * q * q + 0.1 * u; };
  s.dF = [](double u) { return 2 * u * (u * u - 1) + 0.1; };
  s.d2F = [](double u) { return 6 * u * u - 2; };
  s.d3F = [](double u) { return 12 * u; };
  const auto rep = assert_double_well(s, probe_grid());
  CHECK_FALSE(rep.all_pass);
  CHECK_FALSE(rep.clauses[2].pass);
}

TEST_CASE("non-finite potential raises") {
  PotentialSpec s = quartic_potential();
  s.F = [](double u) { return u > 2.5 ? std::nan("") : u * u; };
  CHECK_THROWS(assert_double_well(s, probe_grid()));
}

TEST_CASE("G values for the quartic") {
  const auto spec = quartic_potential();
  // antiderivative of (1 - u^2) is u - u^3/3, so G(1) = 2/3
  CHECK(g_value(spec, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(g_value(spec, 0.0) == 0.0);
  CHECK(g_value(spec, -1.0) == doctest::Approx(-2.0 / 3.0).epsilon(1e-13));
  // quadrature route agrees with the closed form
  for (double u : {0.3, 1.0, -0.7, 1.8, -2.4}) {
    CHECK(g_value_quadrature(spec, u) == doctest::Approx(g_value(spec, u)).epsilon(1e-12));
  }
}

TEST_CASE("G is strictly increasing with G(0) = 0") {
  const auto spec = quartic_potential();
  double prev = g_value(spec, -3.0);
  const auto grid = probe_grid(-3.0, 3.0, 1001);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double g = g_value(spec, grid[i]);
    CHECK(g > prev);
    prev = g;
  }
}

TEST_CASE("surface tension") {
  const auto spec = quartic_potential();
  CHECK(std::abs(surface_tension(spec) - 4.0 / 3.0) < 1e-10);
  CHECK(surface_tension(spec) > 0.0);

  // scaling F by 4 doubles C_* (sqrt(2*4F) = 2 sqrt(2F))
  PotentialSpec scaled = spec;
  scaled.name = "scaled";
  scaled.F = [](double u) { double q = u * u - 1; return 2.0 * q * q; };
  scaled.dF = [](double u) { return 8 * u * (u * u - 1); };
  scaled.d2F = [](double u) { return 24 * u * u - 8; };
  scaled.d3F = [](double u) { return 48 * u; };
  scaled.closed_form_G = {};
  CHECK(surface_tension(scaled) == doctest::Approx(8.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("coefficient-defined quartic matches the named one") {
  const auto a = quartic_potential();
  const auto b = potential_from_coeffs({0.5, 0.0, -1.0, 0.0, 0.5});
  for (double u : probe_grid(-3, 3, 1001)) {
    CHECK(b.F(u) == doctest::Approx(a.F(u)).epsilon(1e-14));
    CHECK(b.dF(u) == doctest::Approx(a.dF(u)).epsilon(1e-14));
    CHECK(b.d2F(u) == doctest::Approx(a.d2F(u)).epsilon(1e-14));
    CHECK(b.d3F(u) == doctest::Approx(a.d3F(u)).epsilon(1e-14));
  }
  CHECK(assert_double_well(b, probe_grid()).all_pass);
}

TEST_CASE("cutoff potential") {
  const auto spec = quartic_potential();
  const auto cut = cutoff(spec, 2.0);
  const auto& fb = cut.modified;

  // unchanged inside the cut radius
  CHECK(fb.F(1.5) == doctest::Approx(0.78125).epsilon(1e-14));
  for (double u : probe_grid(-2, 2, 1001)) {
    CHECK(fb.F(u) == doctest::Approx(spec.F(u)).epsilon(1e-14));
  }

  // bounded slope far out, below the blend-exit value
  CHECK(std::abs(fb.dF(100.0)) <= std::abs(spec.dF(2.0)));
  CHECK(std::abs(fb.dF(100.0)) == doctest::Approx(0.5 * spec.dF(2.0)));

  // Fbar <= F everywhere
  for (double u : probe_grid(-8, 8, 2001)) {
    CHECK(fb.F(u) <= spec.F(u) + 1e-12);
  }
  CHECK(fb.F(5.0) <= spec.F(5.0));

  // still a valid double well
  CHECK(assert_double_well(fb, probe_grid()).all_pass);

  // C^1 match at the joints by finite differences
  for (double x : {2.0, 3.0, -2.0, -3.0}) {
    const double h = 1e-6;
    const double fd = (fb.F(x + h) - fb.F(x - h)) / (2 * h);
    CHECK(fd == doctest::Approx(fb.dF(x)).epsilon(1e-5));
  }

  // values and first two derivatives at the wells are untouched
  for (double w : {-1.0, 1.0}) {
    CHECK(fb.F(w) == spec.F(w));
    const double h = 1e-6;
    CHECK(std::abs((fb.F(w + h) - fb.F(w - h)) / (2 * h) - spec.dF(w)) < 1e-6);
    CHECK(std::abs((fb.F(w + h) - 2 * fb.F(w) + fb.F(w - h)) / (h * h) - spec.d2F(w)) < 1e-3);
  }

  CHECK_THROWS(cutoff(spec, 1.5));
}

TEST_CASE("adaptive quadrature hits tight tolerances") {
  auto f = [](double x) { return std::exp(-x * x); };
  const double ref = std::sqrt(M_PI) * std::erf(3.0);
  CHECK(integrate_adaptive(f, -3.0, 3.0, 1e-13) == doctest::Approx(ref).epsilon(1e-13));
}
