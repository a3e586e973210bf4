#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace slitflow::stats {

/// Streaming mean/variance (Welford) with compensated mean updates and
/// pairwise merging (Chan et al.).
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& other);

  std::size_t count() const { return n_; }
  double mean() const { return mean_ + comp_; }
  /// Unbiased sample variance (0 when n < 2).
  double variance() const;
  /// Standard error of the mean.
  double standard_error() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double comp_ = 0.0;
  double m2_ = 0.0;
};

/// Ensemble statistics with provenance and a z-test against a target.
struct McReport {
  std::string name;
  double kappa = 0.0;
  double alpha = 0.0;
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double se = 0.0;
  double target = 0.0;
  double zscore = 0.0;
  double threshold = 3.0;
  bool pass = false;
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::string note;
};

/// Builds a report from accumulated samples; pass iff |z| < threshold.
McReport make_report(const std::string& name, const RunningStats& acc, double target,
                     double threshold = 3.0);

/// Standard normal CDF.
double normal_cdf(double x);

/// Two-sided Kolmogorov-Smirnov statistic of samples against N(mean, sd²).
double ks_normal_statistic(std::span<const double> samples, double mean, double sd);

/// Asymptotic critical value of the KS statistic at level 1%.
double ks_critical_1pct(std::size_t n);

}  // namespace slitflow::stats
