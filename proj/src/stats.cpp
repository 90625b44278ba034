#include "kinklab/stats.hpp"

#include <algorithm>
#include <cmath>

namespace kink {

double RunningStats::se() const { return n > 1 ? std::sqrt(variance() / n) : 0.0; }

void RunningStats::merge(const RunningStats& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double d = o.mean - mean;
  const long nn = n + o.n;
  m2 += o.m2 + d * d * (static_cast<double>(n) * o.n) / nn;
  mean += d * o.n / nn;
  n = nn;
}

double ks_uniform(std::vector<double> samples, double lo, double hi) {
  samples.erase(std::remove_if(samples.begin(), samples.end(),
                               [=](double x) { return x < lo || x > hi; }),
                samples.end());
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  if (samples.empty()) return 1.0;
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = (samples[i] - lo) / (hi - lo);
    d = std::max(d, std::max((i + 1) / n - cdf, cdf - i / n));
  }
  return d;
}

double batch_means_se(const std::vector<double>& trace, int n_batches) {
  const long n = static_cast<long>(trace.size());
  if (n < 2 * n_batches) n_batches = std::max(2, static_cast<int>(n / 2));
  const long b = n / n_batches;
  if (b < 1) return 0.0;
  RunningStats batches;
  for (int k = 0; k < n_batches; ++k) {
    double m = 0.0;
    for (long i = k * b; i < (k + 1) * b; ++i) m += trace[i];
    batches.add(m / b);
  }
  return std::sqrt(batches.variance() / n_batches);
}

double effective_sample_size(const std::vector<double>& trace) {
  const long n = static_cast<long>(trace.size());
  if (n < 8) return static_cast<double>(n);
  double mean = 0.0;
  for (double x : trace) mean += x;
  mean /= n;
  std::vector<double> c(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) c[i] = trace[i] - mean;
  const auto gamma = [&](long lag) {
    double s = 0.0;
    for (long i = 0; i + lag < n; ++i) s += c[i] * c[i + lag];
    return s / n;
  };
  const double g0 = gamma(0);
  if (g0 <= 0.0) return static_cast<double>(n);
  // sum of autocovariances over lag pairs while the pair sums stay positive
  double tau = g0;
  for (long lag = 1; lag + 1 < n / 2; lag += 2) {
    const double pair = gamma(lag) + gamma(lag + 1);
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  return std::max(1.0, n * g0 / tau);
}

double binomial_se(double p_hat, long n) {
  return n > 0 ? std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / n) : 0.0;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

double ks_two_sample_p(const std::vector<double>& a, const std::vector<double>& b) {
  const double d = ks_two_sample(a, b);
  const double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
  const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k)
    p += 2.0 * (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
  return std::clamp(p, 0.0, 1.0);
}

double log_sum_exp(const std::vector<double>& x) {
  double mx = -1e300;
  for (double v : x) mx = std::max(mx, v);
  double s = 0.0;
  for (double v : x) s += std::exp(v - mx);
  return mx + std::log(s);
}

double zero_count_upper_p(long n) { return n > 0 ? 3.0 / static_cast<double>(n) : 1.0; }

}  // namespace kink
