#include "kinklab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace kink {

namespace {

GaussRule make_rule(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  // Newton iteration on P_n, Chebyshev-angle initial guesses
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p0 = 0.0, p1 = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      p0 = 1.0;
      p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    p0 = 1.0;
    p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_rule(int order) {
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, make_rule(order)).first;
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, int order) {
  return integrate_fn(f, a, b, order);
}

namespace {

double adapt(const std::function<double(double)>& f, double a, double b, double whole,
             double tol, int order, int depth, int max_depth) {
  const double m = 0.5 * (a + b);
  const double left = integrate_fn(f, a, m, order);
  const double right = integrate_fn(f, m, b, order);
  const double err = std::abs(left + right - whole);
  if (err < tol || depth >= max_depth) {
    if (depth >= max_depth && err >= tol) throw ToleranceError{left + right, err};
    return left + right;
  }
  return adapt(f, a, m, left, 0.5 * tol, order, depth + 1, max_depth) +
         adapt(f, m, b, right, 0.5 * tol, order, depth + 1, max_depth);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int order, int max_depth) {
  if (a == b) return 0.0;
  const double whole = integrate_fn(f, a, b, order);
  return adapt(f, a, b, whole, abs_tol, order, 0, max_depth);
}

}  // namespace kink
