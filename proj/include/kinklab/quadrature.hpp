#pragma once

#include <functional>
#include <vector>

namespace kink {

// Gauss-Legendre rule on [-1,1]
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

// cached rule of given order (nodes via Newton iteration on P_n)
const GaussRule& gauss_rule(int order);

// fixed-order Gauss-Legendre on [a,b]
double integrate(const std::function<double(double)>& f, double a, double b, int order = 8);

template <typename F>
double integrate_fn(F&& f, double a, double b, int order = 8) {
  const GaussRule& r = gauss_rule(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(mid + half * r.x[i]);
  return s * half;
}

// Adaptive composite Gauss-Legendre by interval bisection; the error
// estimate for a segment is |GL(seg) - GL(left)+GL(right)|.
// Throws ToleranceError when max_depth is hit before abs_tol is met.
struct ToleranceError {
  double achieved_estimate;
  double error_estimate;
};

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-12, int order = 12, int max_depth = 40);

}  // namespace kink
