#pragma once

#include <stdexcept>
#include <vector>

#include "kinklab/grid.hpp"
#include "kinklab/instanton.hpp"
#include "kinklab/potential.hpp"

namespace kink {

// Ginzburg-Landau energy H(u) = int [ u'^2/2 + F(u) ] - C_* for paths with
// +-1 boundary data (trivial extension contributes zero). Kinetic part is
// exact for piecewise-linear u, potential part per-cell Gauss-Legendre.
class EnergyModel {
 public:
  explicit EnergyModel(PotentialSpec spec, int quad_order = 8);

  const PotentialSpec& spec() const { return spec_; }
  double c_star() const { return c_star_; }
  int quad_order() const { return order_; }

  double energy(const PLPath& u) const;
  // H(u) + C_* - [G(u(+inf)) - G(u(-inf))]; nonnegative for all inputs
  double completing_squares_gap(const PLPath& u) const;
  // eps^-1 int_{-L}^{L} F(u), the Gibbs exponent (same quadrature order)
  double phi(const PLPath& u) const;

 private:
  PotentialSpec spec_;
  double c_star_;
  int order_;
};

struct FermiCoords {
  double xi = 0.0;
  std::vector<double> v_nodes;        // u - m_xi at the grid nodes
  double dist_l2 = 0.0;               // ||u - m_xi||_{L2(R)}
  double normality_residual = 0.0;    // <u - m_xi, m'_xi>
  bool multimodal = false;
};

struct NoInterfaceError : std::domain_error {
  using std::domain_error::domain_error;
};

// minimizes xi -> ||u - m_xi||_{L2(R)}^2, bracketed at the first zero
// crossing, golden-section to 1e-8
FermiCoords fermi_project(const PLPath& u, const InstantonProfile& p);

enum class PathNorm { L2, Linf };

double dist_to_M(const PLPath& u, const InstantonProfile& p, PathNorm norm);
double dist_h1(const PLPath& u, const InstantonProfile& p);

// residual norms against m_xi with analytic tails outside [-L, L]
double residual_l2_sq(const PLPath& u, const InstantonProfile& p, double xi);
double residual_h1_sq(const PLPath& u, const InstantonProfile& p, double xi);
double residual_inner_dm(const PLPath& u, const InstantonProfile& p, double xi);

// int v'^2 + F''(m_xi) v^2 for zero-boundary v
double quad_form(const InstantonProfile& p, double xi, const PLPath& v, int quad_order = 8);

struct SpectralReport {
  double h = 0.0;
  double T = 0.0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double constrained_gap = 0.0;     // c3 estimate: min Rayleigh over m'^perp
  double eigvec0_alignment = 0.0;   // |<e0, m'>| / (|e0||m'|)
  std::vector<double> grid;         // interior mesh points
  std::vector<double> eigvec0;      // ground state, Euclidean-normalized
};

// finite-difference A_0 = -Lap + F''(m) on [-T,T], Dirichlet ends
SpectralReport spectral_report(const InstantonProfile& p, double h = 0.01, double T = 20.0);

// quadratic lower-bound constant: <Av,v> >= 2 c0_hat |v|_{H1}^2 on m'^perp
double landscape_c0(const SpectralReport& rep, const PotentialSpec& spec);

struct LandscapeCheck {
  bool lower_ok = false;
  bool upper_ok = false;
  double H = 0.0;
  double H0 = 0.0;           // energy of the discretized profile itself (grid bias)
  double bound_lo = 0.0;
  double bound_hi = 0.0;
  double v_h1 = 0.0;         // ||v||_{H1}
  double cubic_envelope = 0.0;
};

// sandwich c0 |v|_H1^2 <= H(m+v) <= c4 |v|_H1^2 with the cubic remainder
// envelope; v must be (mostly) normal to m', and |v|_H1 <= delta1
LandscapeCheck landscape_check(const InstantonProfile& p, const SpectralReport& rep,
                               const PLPath& v, double delta1 = 0.2, int quad_order = 8);

// Frechet derivative of u -> xi(u) in direction h (zero-boundary):
// -<m'_xi, h> / (|m'|^2 - <v, m''_xi>)
double xi_directional_derivative(const PLPath& u, const PLPath& h, const InstantonProfile& p,
                                 double tube_radius = 0.5);

}  // namespace kink
