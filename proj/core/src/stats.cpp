#include "bohrlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "bohrlab/errors.hpp"

namespace bohrlab {

void RunningMoments::add(double x) noexcept {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void RunningMoments::merge(const RunningMoments& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double n1 = static_cast<double>(count_);
  const double n2 = static_cast<double>(other.count_);
  const double delta = other.mean_ - mean_;
  const double total = n1 + n2;
  mean_ += delta * n2 / total;
  m2_ += other.m2_ + delta * delta * n1 * n2 / total;
  count_ += other.count_;
}

double RunningMoments::variance() const noexcept {
  return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
}

double RunningMoments::stddev() const noexcept { return std::sqrt(variance()); }

double RunningMoments::stderr_of_mean() const noexcept {
  return count_ > 0 ? stddev() / std::sqrt(static_cast<double>(count_)) : 0.0;
}

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  require(trials > 0, "wilson_interval: trials must be positive");
  require(successes >= 0 && successes <= trials, "wilson_interval: successes out of range");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double binomial_sigma(double p, std::int64_t trials) {
  require(trials > 0, "binomial_sigma: trials must be positive");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

ChiSquareTest two_sample_chi_square(std::span<const std::int64_t> first,
                                    std::span<const std::int64_t> second,
                                    double min_expected) {
  const std::size_t bins = std::max(first.size(), second.size());
  auto at = [](std::span<const std::int64_t> h, std::size_t i) -> double {
    return i < h.size() ? static_cast<double>(h[i]) : 0.0;
  };
  double total_a = 0.0;
  double total_b = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    total_a += at(first, i);
    total_b += at(second, i);
  }
  require(total_a > 0 && total_b > 0, "two_sample_chi_square: empty sample");
  const double total = total_a + total_b;

  // Pool bins so the smaller expected count reaches min_expected.
  std::vector<std::pair<double, double>> pooled;
  double acc_a = 0.0;
  double acc_b = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    acc_a += at(first, i);
    acc_b += at(second, i);
    const double row = acc_a + acc_b;
    if (std::min(row * total_a / total, row * total_b / total) >= min_expected) {
      pooled.emplace_back(acc_a, acc_b);
      acc_a = acc_b = 0.0;
    }
  }
  if (acc_a + acc_b > 0.0) {
    if (pooled.empty()) {
      pooled.emplace_back(acc_a, acc_b);
    } else {
      pooled.back().first += acc_a;
      pooled.back().second += acc_b;
    }
  }

  ChiSquareTest result;
  result.bins_used = static_cast<int>(pooled.size());
  if (pooled.size() < 2) return result;
  for (const auto& [a, b] : pooled) {
    const double row = a + b;
    const double ea = row * total_a / total;
    const double eb = row * total_b / total;
    result.statistic += (a - ea) * (a - ea) / ea + (b - eb) * (b - eb) / eb;
  }
  result.degrees_of_freedom = static_cast<int>(pooled.size()) - 1;
  const boost::math::chi_squared_distribution<double> dist(result.degrees_of_freedom);
  result.p_value = boost::math::cdf(boost::math::complement(dist, result.statistic));
  return result;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "fit_line: size mismatch");
  require(x.size() >= 2, "fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0, "fit_line: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

double quantile(std::vector<double> values, double q) {
  require(!values.empty(), "quantile: empty input");
  require(q >= 0.0 && q <= 1.0, "quantile: q outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || values[lo] == values[hi]) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace bohrlab
