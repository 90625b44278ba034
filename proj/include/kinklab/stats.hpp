#pragma once

#include <cstddef>
#include <vector>

namespace kink {

struct RunningStats {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / (n - 1) : 0.0; }
  double se() const;
  // order-independent merge (workers combine in index order)
  void merge(const RunningStats& o);
};

// one-sided KS distance of samples (restricted to [lo,hi]) to Uniform[lo,hi]
double ks_uniform(std::vector<double> samples, double lo, double hi);

// standard error of the mean of a correlated series by non-overlapping
// batch means
double batch_means_se(const std::vector<double>& trace, int n_batches = 32);

// effective sample size via Geyer's initial positive sequence
double effective_sample_size(const std::vector<double>& trace);

double binomial_se(double p_hat, long n);

// two-sample Kolmogorov-Smirnov statistic and its asymptotic p-value
double ks_two_sample(std::vector<double> a, std::vector<double> b);
double ks_two_sample_p(const std::vector<double>& a, const std::vector<double>& b);

// log(sum exp(x_i)) with max shift
double log_sum_exp(const std::vector<double>& x);

// log of the upper confidence bound when no exceedance was observed
// (rule of three at ~95%)
double zero_count_upper_p(long n);

}  // namespace kink
