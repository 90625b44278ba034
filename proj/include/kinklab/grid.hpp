#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace kink {

// Exponent and mesh bookkeeping: interval [-L, L] with L = epsilon^-gamma,
// 2N cells of width delta = L/N, nodes s_k = -L + k*delta for k = 0..2N.
struct ScaleParams {
  double epsilon = 0.1;
  double gamma = 0.3;
  double gamma1 = 0.1;
  double gamma2 = 0.5;
  int N = 0;  // 0 requests auto N = ceil(epsilon^-gamma2)

  double half_length() const { return std::pow(epsilon, -gamma); }
  double mesh() const { return half_length() / N; }
  int n_nodes() const { return 2 * N + 1; }
  double node(int k) const { return (k - N) * mesh(); }
  double cutoff_radius() const { return std::pow(epsilon, -gamma1); }
  // admissible translate window for cutoff profiles, clamped at 0 so the
  // centered profile is always representable at desk scale
  double shift_window() const {
    return std::max(0.0, half_length() - cutoff_radius() - 1.0);
  }

  static int auto_nodes(double epsilon, double gamma2) {
    return static_cast<int>(std::ceil(std::pow(epsilon, -gamma2)));
  }

  // returns one message per violated constraint, quoting the inequality
  std::vector<std::string> violations() const;
  bool valid() const { return violations().empty(); }
  void require_valid() const;  // throws std::invalid_argument listing all
};

ScaleParams make_params(double epsilon, double gamma, double gamma1, double gamma2,
                        int N = 0);

enum class Boundary { FixedPlusMinus, Zero };

// Piecewise-linear path on the grid; values include the two boundary nodes.
struct PLPath {
  ScaleParams params;
  Boundary boundary = Boundary::FixedPlusMinus;
  std::vector<double> values;

  int n_nodes() const { return params.n_nodes(); }
  double at_node(int k) const { return values[k]; }
  // linear interpolation inside [-L, L], constant extension outside
  double operator()(double s) const;
  // exact integral of the interpolant over [a,b] within [-L,L]
  double integral(double a, double b) const;
  void check() const;  // boundary/shape invariants, throws on violation
};

PLPath make_path(const ScaleParams& p, Boundary b, std::vector<double> values);
PLPath zero_path(const ScaleParams& p, Boundary b);

}  // namespace kink
