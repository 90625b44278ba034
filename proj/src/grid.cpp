#include "kinklab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kink {

std::vector<std::string> ScaleParams::violations() const {
  std::vector<std::string> out;
  if (!(epsilon > 0.0 && epsilon < 1.0)) out.push_back("epsilon: 0 < epsilon < 1");
  if (!(gamma > 0.0 && gamma < 2.0 / 3.0)) out.push_back("gamma: Assume 0 < gamma < 2/3");
  if (!(gamma1 > 0.0 && gamma1 < gamma)) out.push_back("gamma1: 0 < gamma1 < gamma");
  if (!(-gamma1 - gamma / 2.0 + gamma2 > 0.0))
    out.push_back("gamma2: -gamma1 - gamma/2 + gamma2 > 0");
  if (!(-gamma - gamma1 / 2.0 + gamma2 > 0.0))
    out.push_back("gamma2: -gamma - gamma1/2 + gamma2 > 0");
  if (!(gamma2 < 1.0)) out.push_back("gamma2: gamma2 < 1");
  if (N < 0) out.push_back("N: N >= 1 (or 0 for auto)");
  return out;
}

void ScaleParams::require_valid() const {
  auto v = violations();
  if (v.empty()) return;
  std::ostringstream os;
  os << "invalid scale parameters:";
  for (const auto& s : v) os << "\n  violated: " << s;
  throw std::invalid_argument(os.str());
}

ScaleParams make_params(double epsilon, double gamma, double gamma1, double gamma2, int N) {
  ScaleParams p{epsilon, gamma, gamma1, gamma2, N};
  if (p.N == 0) p.N = ScaleParams::auto_nodes(epsilon, gamma2);
  p.require_valid();
  return p;
}

double PLPath::operator()(double s) const {
  const double L = params.half_length();
  if (s <= -L) return values.front();
  if (s >= L) return values.back();
  const double delta = params.mesh();
  const double t = (s + L) / delta;
  int k = static_cast<int>(std::floor(t));
  k = std::min(std::max(k, 0), 2 * params.N - 1);
  const double frac = t - k;
  return values[k] * (1.0 - frac) + values[k + 1] * frac;
}

double PLPath::integral(double a, double b) const {
  if (a > b) return -integral(b, a);
  const double L = params.half_length();
  const double delta = params.mesh();
  double total = 0.0;
  // constant-extension pieces
  if (a < -L) {
    total += (std::min(b, -L) - a) * values.front();
    a = -L;
    if (a >= b) return total;
  }
  if (b > L) {
    total += (b - std::max(a, L)) * values.back();
    b = L;
    if (a >= b) return total;
  }
  int ka = static_cast<int>(std::floor((a + L) / delta));
  ka = std::min(std::max(ka, 0), 2 * params.N - 1);
  for (int k = ka; k < 2 * params.N; ++k) {
    const double lo = std::max(a, params.node(k));
    const double hi = std::min(b, params.node(k + 1));
    if (hi <= lo) {
      if (params.node(k) > b) break;
      continue;
    }
    // trapezoid is exact on a linear segment
    total += 0.5 * ((*this)(lo) + (*this)(hi)) * (hi - lo);
  }
  return total;
}

void PLPath::check() const {
  params.require_valid();
  if (static_cast<int>(values.size()) != params.n_nodes())
    throw std::invalid_argument("PLPath: value count does not match 2N+1 nodes");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("PLPath: non-finite node value");
  if (boundary == Boundary::FixedPlusMinus) {
    if (values.front() != -1.0 || values.back() != 1.0)
      throw std::invalid_argument("PLPath: boundary values must be -1 and +1 exactly");
  } else {
    if (values.front() != 0.0 || values.back() != 0.0)
      throw std::invalid_argument("PLPath: boundary values must be 0 exactly");
  }
}

PLPath make_path(const ScaleParams& p, Boundary b, std::vector<double> values) {
  PLPath u{p, b, std::move(values)};
  u.check();
  return u;
}

PLPath zero_path(const ScaleParams& p, Boundary b) {
  PLPath u{p, b, std::vector<double>(p.n_nodes(), 0.0)};
  if (b == Boundary::FixedPlusMinus) {
    u.values.front() = -1.0;
    u.values.back() = 1.0;
  }
  return u;
}

}  // namespace kink
