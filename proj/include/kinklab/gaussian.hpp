#pragma once

#include <array>
#include <string>
#include <vector>

#include "kinklab/grid.hpp"
#include "kinklab/rng.hpp"
#include "kinklab/stats.hpp"

namespace kink {

// Reference bridge measure nu^{N,eps}: mean path s -> eps^gamma s, node
// covariance eps (tau ^ tau' - tau tau' / 2L) with tau = s + L.
struct BridgeSpec {
  ScaleParams params;

  double mean(double s) const { return std::pow(params.epsilon, params.gamma) * s; }
  double kernel(double s, double sp) const;
};

// exact node-vector sample: scaled random walk conditioned on the endpoint
PLPath sample_bridge(const BridgeSpec& spec, RngStream& rng);

// log density of the node vector w.r.t. Lebesgue measure on R^{2N-1}
double log_density(const BridgeSpec& spec, const PLPath& u);
// additive normalizer, product-of-transition-kernels route
double log_density_normalizer_product(const BridgeSpec& spec);
// same constant through det(-Lap_N): (2pi)^{-(2N-1)/2} e^{eps^{gamma-1}} det^{1/2}
double log_density_normalizer_determinant(const BridgeSpec& spec);

// conditional refinement: values of the bridge at M equispaced interior
// points of cell k, linear interpolant plus an independent scaled bridge
std::vector<double> refine(const BridgeSpec& spec, const PLPath& u, int cell, int M,
                           RngStream& rng);

struct ConcentrationReport {
  std::string bound_name;
  std::vector<double> r_grid;
  std::vector<double> empirical_p;
  std::vector<double> theoretical_p;
  long n_samples = 0;
  double centering = 0.0;
  RunningStats stat;     // the norm statistic itself
  RunningStats stat_sq;  // its square (expected-value checks)

  // one-sided domination: empirical <= theoretical + z * binomial SE
  bool dominated(double z = 3.0) const;
};

// r values at which each discretization bound crosses the probabilities
// p = 0.8 ... 1e-4 (log spaced, n_points entries per report)
struct RGrids {
  std::vector<double> l2;
  std::vector<double> cell;
  std::vector<double> linf;
};
RGrids default_r_grids(const ScaleParams& params, int n_points = 10);

// Monte Carlo tails of |u - u^N| in L2 (whole line), L2 (one cell) and
// Linf against the printed discretization bounds
std::array<ConcentrationReport, 3> discretization_tails(const BridgeSpec& spec,
                                                        long n_samples, int M,
                                                        const RGrids& r_grids,
                                                        RngStream rng, int workers = 0);

// Gaussian concentration for the centered node vector in Euclidean norm:
// P(|x| >= sqrt(Tr S) + r) <= exp(-r^2 / 2 sigma^2)
ConcentrationReport node_vector_tail(const BridgeSpec& spec, long n_samples,
                                     const std::vector<double>& r_grid, RngStream rng,
                                     int workers = 0);

// Discrete massive free field: zero-boundary Gaussian with precision
// (kappa/eps) (mass + stiffness) over piecewise-linear paths.
struct MassiveFieldSpec {
  ScaleParams params;
  double kappa = 1.0;
};

PLPath sample_massive_field(const MassiveFieldSpec& spec, RngStream& rng);
// exact piecewise-linear H1 form u^T (M + K) u
double h1_form(const PLPath& u);

ConcentrationReport massive_h1_tail(const MassiveFieldSpec& spec, long n_samples,
                                    const std::vector<double>& r_grid, RngStream rng,
                                    int workers = 0);

struct ZRatios {
  double log_z1 = 0.0;  // log int exp(-(1/2eps) int u'^2) over the +-1 affine space
  double log_z2 = 0.0;  // log int exp(-(kappa/2eps)(|u|^2 + |u'|^2)) over zero boundary
  double ratio_log = 0.0;        // z2 - z1 with the boundary term removed (GaNo object)
  double det_ratio_log = 0.0;    // logdet(K + M) - logdet(K)
  double poincare_lo = 0.0;      // 0
  double poincare_hi = 0.0;      // 2N log(1 + 2L/pi)
  bool poincare_ok = false;
  double log_z1_norm_product = 0.0;      // density normalizer, kernel-product route
  double log_z1_norm_determinant = 0.0;  // density normalizer, determinant route
  double log_z3_minus_z1 = 0.0;          // kinetic action without 1/eps vs with
};

ZRatios z_ratios(const ScaleParams& params, double kappa);

}  // namespace kink
