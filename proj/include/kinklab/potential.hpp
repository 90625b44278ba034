#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kink {

using ScalarMap = std::function<double(double)>;

// Symmetric double well with wells pinned at +-1. Derivatives are supplied
// (closed form for the built-ins, polynomial differentiation for
// coefficient-defined wells).
struct PotentialSpec {
  std::string name;
  ScalarMap F;
  ScalarMap dF;
  ScalarMap d2F;
  ScalarMap d3F;
  ScalarMap closed_form_G;  // empty when no closed form is known
  double well = 1.0;        // wells at -well, +well (fixed at 1)
};

PotentialSpec quartic_potential();
// F(u) = sum_k coeffs[k] * u^k
PotentialSpec potential_from_coeffs(const std::vector<double>& coeffs,
                                    const std::string& name = "coeffs");
PotentialSpec lookup_potential(const std::string& name);

std::vector<double> probe_grid(double lo = -3.0, double hi = 3.0, int n = 1201);

struct AssumptionClause {
  char clause;  // 'a', 'b', 'c'
  bool pass;
  std::string witness;  // empty when the clause passes
};

struct AssumptionReport {
  bool all_pass = false;
  std::vector<AssumptionClause> clauses;
};

// checks (a) F >= 0 with zeros exactly at the wells, (b) dF sign pattern
// with zeros {-1,0,1} and curvature signs, (c) symmetry, on the probe grid
AssumptionReport assert_double_well(const PotentialSpec& spec,
                                    const std::vector<double>& probe);

// G(u) = int_0^u sqrt(2 F(t)) dt ; closed form when the spec carries one
double g_value(const PotentialSpec& spec, double u);
double g_value_quadrature(const PotentialSpec& spec, double u, double abs_tol = 1e-12);

// C_* = G(1) - G(-1)
double surface_tension(const PotentialSpec& spec);

struct CutoffPotential {
  PotentialSpec base;
  double cut_radius = 2.0;
  double blend_width = 1.0;
  PotentialSpec modified;  // usable anywhere a PotentialSpec is
};

// Modify F outside [-cut_radius, cut_radius]: cubic-Hermite taper of F' to
// half its boundary slope over blend_width, affine continuation beyond.
// Keeps Fbar <= F, Fbar C^2, |Fbar'| globally bounded.
CutoffPotential cutoff(const PotentialSpec& spec, double cut_radius,
                       double blend_width = 1.0);

}  // namespace kink
