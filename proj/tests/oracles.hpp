#pragma once

// Reference computations used by the tests. Each one is written from the
// defining formula, with no code shared with the library under test.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

/// True when some nonzero v in {-1, 0, 1}^|s| has sum v_i s_i = 0 (all 3^|s| vectors).
inline bool has_relation(const std::vector<std::int64_t>& s) {
  std::int64_t total = 1;
  for (std::size_t i = 0; i < s.size(); ++i) total *= 3;
  for (std::int64_t code = 1; code < total; ++code) {
    std::int64_t c = code, sum = 0;
    for (std::size_t i = 0; i < s.size(); ++i, c /= 3) sum += (c % 3 == 1 ? 1 : c % 3 == 2 ? -1 : 0) * s[i];
    if (sum == 0) return true;
  }
  return false;
}

/// E|X - lambda| for X ~ Poisson(lambda), by summing the series.
inline double folded_poisson_mean(double lambda) {
  double term = std::exp(-lambda), sum = 0.0;
  for (int k = 0; k < 400; ++k) {
    sum += std::abs(k - lambda) * term;
    term *= lambda / (k + 1);
  }
  return sum;
}

/// J_n(x) = (1/pi) int_0^pi cos(n s - x sin s) ds by the composite Simpson rule.
inline double bessel_j(int n, double x) {
  const int steps = 20000;
  const double h = std::numbers::pi / steps;
  double acc = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double s = i * h;
    const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * std::cos(n * s - x * std::sin(s));
  }
  return acc * h / 3.0 / std::numbers::pi;
}

inline double bessel_sup(double x) {
  double best = 0.0;
  for (int n = 0; n < 40; ++n) best = std::max(best, std::abs(bessel_j(n, x)));
  return best;
}

/// int_0^1 |sin pi t|^{-p} dt = Gamma((1-p)/2) / (sqrt(pi) Gamma(1 - p/2)).
inline double sine_power_integral(double p) {
  return std::tgamma((1.0 - p) / 2.0) / (std::sqrt(std::numbers::pi) * std::tgamma(1.0 - p / 2.0));
}

/// Triangle of height 1/eps on [-eps, eps] mod 1.
inline double triangle(double t, double eps) {
  double r = t - std::floor(t);
  if (r > 0.5) r = 1.0 - r;
  return r >= eps ? 0.0 : (1.0 - r / eps) / eps;
}

/// Y_N for an explicit multiset {n: xi_n} on I = [a, a + len), midpoint rule with `nodes` points.
inline double martingale_value(const std::vector<std::pair<std::int64_t, std::int64_t>>& members, double alpha,
                               double eps, double a, double len, std::int64_t N, int nodes) {
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double t = a + (i + 0.5) * len / nodes;
    double log_comp = 0.0;
    for (std::int64_t n = 1; n <= N; ++n) log_comp -= alpha / n * (triangle(n * t, eps) - 1.0);
    double prod = std::exp(log_comp);
    for (const auto& [n, xi] : members)
      if (n <= N) prod *= std::pow(triangle(n * t, eps), static_cast<double>(xi));
    acc += prod;
  }
  return acc * len / nodes;
}

/// E[Y_N^2] = int int exp(sum_n (alpha/n)(f(ns) - 1)(f(nt) - 1)) ds dt over I x I, midpoint rule.
inline double second_moment(double alpha, double eps, double a, double len, std::int64_t N, int nodes) {
  std::vector<std::vector<double>> g(static_cast<std::size_t>(nodes), std::vector<double>(static_cast<std::size_t>(N)));
  for (int i = 0; i < nodes; ++i) {
    const double t = a + (i + 0.5) * len / nodes;
    for (std::int64_t n = 1; n <= N; ++n) g[i][n - 1] = triangle(n * t, eps) - 1.0;
  }
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      double e = 0.0;
      for (std::int64_t n = 1; n <= N; ++n) e += alpha / n * g[i][n - 1] * g[j][n - 1];
      acc += std::exp(e);
    }
  const double h = len / nodes;
  return acc * h * h;
}

/// sum_{n <= N} (1 - e^{-w(n)}).
template <class W>
double expected_count(W w, std::int64_t N) {
  double s = 0.0;
  for (std::int64_t n = 1; n <= N; ++n) s += 1.0 - std::exp(-w(n));
  return s;
}

}  // namespace oracle
