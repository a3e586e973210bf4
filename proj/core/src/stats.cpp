#include "slitflow/stats.hpp"

#include <algorithm>
#include <cmath>

namespace slitflow::stats {

void RunningStats::add(double x) {
  ++n_;
  const double delta = x - mean();
  const double step = delta / static_cast<double>(n_);
  // Neumaier-compensated update of the running mean.
  const double t = mean_ + step;
  if (std::abs(mean_) >= std::abs(step)) {
    comp_ += (mean_ - t) + step;
  } else {
    comp_ += (step - t) + mean_;
  }
  mean_ = t;
  m2_ += delta * (x - mean());
}

void RunningStats::merge(const RunningStats& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double delta = other.mean() - mean();
  const double m = mean() + delta * nb / n;
  m2_ = m2_ + other.m2_ + delta * delta * na * nb / n;
  n_ += other.n_;
  mean_ = m;
  comp_ = 0.0;
}

double RunningStats::variance() const {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double RunningStats::standard_error() const {
  return n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

McReport make_report(const std::string& name, const RunningStats& acc, double target,
                     double threshold) {
  McReport r;
  r.name = name;
  r.n = acc.count();
  r.mean = acc.mean();
  r.variance = acc.variance();
  r.se = acc.standard_error();
  r.target = target;
  r.threshold = threshold;
  if (r.se > 0.0) {
    r.zscore = (r.mean - target) / r.se;
  } else {
    r.zscore = (r.mean == target) ? 0.0 : INFINITY;
    r.note = "degenerate variance";
  }
  r.pass = std::abs(r.zscore) < threshold;
  return r;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_normal_statistic(std::span<const double> samples, double mean, double sd) {
  std::vector<double> z(samples.begin(), samples.end());
  for (double& v : z) v = (v - mean) / sd;
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = normal_cdf(z[i]);
    d = std::max(d, std::max(static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n));
  }
  return d;
}

double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

}  // namespace slitflow::stats
