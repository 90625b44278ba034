#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kink {

// symmetric tridiagonal matrix: diag[i], off[i] couples i and i+1
struct Tridiag {
  std::vector<double> diag;
  std::vector<double> off;
  std::size_t n() const { return diag.size(); }
};

// number of eigenvalues strictly below lambda (Sturm sequence)
inline int sturm_count(const Tridiag& T, double lambda) {
  int count = 0;
  double d = 1.0;
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  for (std::size_t i = 0; i < T.n(); ++i) {
    const double offsq = i == 0 ? 0.0 : T.off[i - 1] * T.off[i - 1];
    d = T.diag[i] - lambda - offsq / d;
    if (d == 0.0) d = tiny;
    if (d < 0.0) ++count;
  }
  return count;
}

// k-th smallest eigenvalue (k = 0 is the lowest) by bisection
inline double tridiag_eigenvalue(const Tridiag& T, int k, double tol = 1e-12) {
  double lo = T.diag[0], hi = T.diag[0];
  for (std::size_t i = 0; i < T.n(); ++i) {
    const double r = (i > 0 ? std::abs(T.off[i - 1]) : 0.0) + (i + 1 < T.n() ? std::abs(T.off[i]) : 0.0);
    lo = std::min(lo, T.diag[i] - r);
    hi = std::max(hi, T.diag[i] + r);
  }
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(T, mid) > k)
      hi = mid;
    else
      lo = mid;
    if (hi - lo < tol * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

// LDL^T factorization; throws when a pivot vanishes
struct TridiagFactor {
  std::vector<double> d;  // pivots
  std::vector<double> l;  // subdiagonal multipliers
};

inline TridiagFactor tridiag_factor(const Tridiag& T, double shift = 0.0) {
  TridiagFactor f;
  const std::size_t n = T.n();
  f.d.resize(n);
  f.l.resize(n > 0 ? n - 1 : 0);
  double d = T.diag[0] - shift;
  f.d[0] = d;
  for (std::size_t i = 1; i < n; ++i) {
    if (d == 0.0) throw std::runtime_error("tridiag_factor: zero pivot");
    f.l[i - 1] = T.off[i - 1] / d;
    d = T.diag[i] - shift - f.l[i - 1] * T.off[i - 1];
    f.d[i] = d;
  }
  return f;
}

inline std::vector<double> tridiag_solve(const TridiagFactor& f, std::vector<double> b) {
  const std::size_t n = f.d.size();
  for (std::size_t i = 1; i < n; ++i) b[i] -= f.l[i - 1] * b[i - 1];
  for (std::size_t i = 0; i < n; ++i) {
    if (f.d[i] == 0.0) throw std::runtime_error("tridiag_solve: zero pivot");
    b[i] /= f.d[i];
  }
  for (std::size_t i = n - 1; i > 0; --i) b[i - 1] -= f.l[i - 1] * b[i];
  return b;
}

// log|det T|; throws on a nonpositive pivot (callers expect SPD)
inline double tridiag_logdet(const Tridiag& T) {
  auto f = tridiag_factor(T);
  double s = 0.0;
  for (double d : f.d) {
    if (d <= 0.0) throw std::runtime_error("tridiag_logdet: matrix is not positive definite");
    s += std::log(d);
  }
  return s;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline std::vector<double> tridiag_apply(const Tridiag& T, const std::vector<double>& x) {
  const std::size_t n = T.n();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = T.diag[i] * x[i];
    if (i > 0) s += T.off[i - 1] * x[i - 1];
    if (i + 1 < n) s += T.off[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

}  // namespace kink
