#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bohrlab {

/// Welford accumulator for mean and variance.
class RunningMoments {
 public:
  void add(double x) noexcept;
  void merge(const RunningMoments& other) noexcept;

  std::int64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept;  // unbiased
  double stddev() const noexcept;
  double stderr_of_mean() const noexcept;

 private:
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Wilson score interval for a binomial proportion (z = 1.96 gives 95%).
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.96);

/// Standard deviation of a binomial proportion estimate, sqrt(p(1-p)/n).
double binomial_sigma(double p, std::int64_t trials);

struct ChiSquareTest {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
  int bins_used = 0;
};

/// Two-sample chi-square homogeneity test on aligned histograms.
///
/// Adjacent bins are pooled left to right until each pooled bin has an
/// expected count of at least `min_expected` under the pooled proportion.
ChiSquareTest two_sample_chi_square(std::span<const std::int64_t> first,
                                    std::span<const std::int64_t> second,
                                    double min_expected = 5.0);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares fit y = intercept + slope * x. Needs >= 2 points.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Linear-interpolated empirical quantile, q in [0, 1]. Input need not be sorted.
double quantile(std::vector<double> values, double q);

}  // namespace bohrlab
