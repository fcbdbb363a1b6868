#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bohrlab/analyticity.hpp"
#include "bohrlab/errors.hpp"
#include "bohrlab/rng.hpp"
#include "oracles.hpp"

using namespace bohrlab;

namespace {

/// max_k |(1/K) sum_j e^{-i phi(j/K)} e^{-2 pi i jk/K}| by the O(K^2) sum.
double brute_force_pm(double a, int m, std::int64_t q, std::int64_t K) {
  std::vector<std::complex<double>> v(static_cast<std::size_t>(K));
  for (std::int64_t j = 0; j < K; ++j) {
    double phi = 0.0;
    std::int64_t f = 1;
    for (int k = 1; k <= m; ++k) {
      f *= q;
      phi += a * std::cos(2 * std::numbers::pi * static_cast<double>((f * j) % K) / static_cast<double>(K));
    }
    v[static_cast<std::size_t>(j)] = std::polar(1.0, -phi);
  }
  double best = 0.0;
  for (std::int64_t k = 0; k < K; ++k) {
    std::complex<double> s = 0;
    for (std::int64_t j = 0; j < K; ++j)
      s += v[static_cast<std::size_t>(j)] * std::polar(1.0, -2 * std::numbers::pi * static_cast<double>((j * k) % K) / static_cast<double>(K));
    best = std::max(best, std::abs(s) / static_cast<double>(K));
  }
  return best;
}

}  // namespace

TEST_CASE("lacunary phase") {
  const auto one = LacunaryPhase::make(2.0, 1, 3);
  CHECK(one.a_norm() == doctest::Approx(2.0));
  CHECK(one(0.1) == doctest::Approx(2.0 * std::cos(2 * std::numbers::pi * 0.3)));
  CHECK(LacunaryPhase::make(2.0, 5, 3).a_norm() == doctest::Approx(10.0));
  const auto phi = LacunaryPhase::make(1.5, 4, 3);
  for (std::int64_t j = 0; j < 200; ++j) {
    CHECK(phi.at_fraction(j, 200) == doctest::Approx(phi(static_cast<double>(j) / 200.0)).epsilon(1e-9));
    CHECK(std::abs(phi.coefficients().evaluate(static_cast<double>(j) / 200.0).imag()) < 1e-12);
  }
  CHECK_THROWS_AS(LacunaryPhase::make(2.0, 3, 2), ValidationError);
  CHECK_THROWS_AS(LacunaryPhase::make(2.0, 60, 3), CapacityError);
}

TEST_CASE("haar phase pm against the direct transform") {
  for (int m = 1; m <= 3; ++m) {
    const std::int64_t K = 16 * static_cast<std::int64_t>(std::pow(3, m));
    const auto s = haar_phase_pm(LacunaryPhase::make(2.0, m, 3), K);
    CHECK(s.pm == doctest::Approx(brute_force_pm(2.0, m, 3, K)).epsilon(1e-9));
    CHECK(std::abs(s.parseval - 1.0) < 1e-6);
  }
  CHECK(haar_phase_pm(LacunaryPhase::make(2.0, 1, 3), 48).pm == doctest::Approx(oracle::bessel_sup(2.0)).epsilon(1e-6));
}

TEST_CASE("pm decay profile") {
  const std::vector<int> m{1, 2, 3, 4, 5};
  const auto fit = pm_decay_profile(2.0, m, 3);
  CHECK(fit.samples[0].pm == doctest::Approx(0.5767).epsilon(0.03));
  CHECK(fit.c > 0);
  CHECK(fit.samples[4].pm < fit.samples[0].pm);
  CHECK(fit.r_squared >= 0.95);
  for (const auto& s : fit.samples) {
    CHECK(std::abs(s.parseval - 1.0) < 1e-6);
    CHECK(s.resolution >= 16 * static_cast<std::int64_t>(std::pow(3, s.m)));
    // doubling the resolution changes the estimate by less than 2%
    CHECK(haar_phase_pm(LacunaryPhase::make(2.0, s.m, 3), 2 * s.resolution).pm == doctest::Approx(s.pm).epsilon(0.02));
  }
  CHECK_THROWS_AS(pm_decay_profile(2.0, std::vector<int>{1, 2}, 3), ValidationError);
  CHECK_THROWS_AS(pm_decay_profile(2.0, std::vector<int>{1, 2, 20}, 3), CapacityError);
}

TEST_CASE("block constant weights") {
  const auto flat = WeightSequence::make(Table{std::vector<double>(64, 0.3)}, 64);
  const auto same = block_constant_weights(flat, 3, 1);
  for (std::int64_t n = 1; n <= 64; ++n) CHECK(same[n] == 0.3);

  const auto w = WeightSequence::make(Growing{GrowthLaw::log, 1.0, 0.5}, 4096);
  const auto b = block_constant_weights(w, 4, 16);
  for (std::int64_t n = 1; n <= 4096; ++n) CHECK(b[n] <= w[n]);
  for (std::int64_t start = 16; start + 15 <= 4096; start += 16)
    for (std::int64_t n = start; n < start + 16; ++n) CHECK(b[n] == w[start + 15]);
  double previous = 0.0;
  for (std::int64_t block = 64; block <= 4096; block *= 2) {
    double lo = 1e300;
    for (std::int64_t n = block / 2; n < block; ++n) lo = std::min(lo, static_cast<double>(n) * b[n]);
    CHECK(lo > previous);
    previous = lo;
  }
  const auto untouched = block_constant_weights(w, 4, 4096);
  for (std::int64_t n = 1; n <= 4096; ++n) CHECK(untouched[n] == w[n]);
}

TEST_CASE("tau and sigma") {
  const auto w = WeightSequence::make(Table{std::vector<double>(20, 2.0)}, 20);
  const RandomSet set(20, {{3, 2}, {15, 1}}, 0, SampleSource::poisson);
  const auto ts = build_tau_sigma(set, w, 5, 10);
  CHECK(ts.tau.empty());
  CHECK(ts.sigma.atoms.size() == 6);
  CHECK(ts.sigma_mass == doctest::Approx(12.0));
  const auto inside = build_tau_sigma(set, w, 1, 20);
  CHECK(inside.tau_mass == 3.0);
  CHECK(inside.tau.total_variation() == 3.0);

  const auto g = WeightSequence::make(Growing{GrowthLaw::power, 1.0, 0.75}, 100);
  double sum = 0.0;
  const std::int64_t seeds = 10000;
  for (std::int64_t s = 0; s < seeds; ++s) {
    const auto t = build_tau_sigma(sample_poisson(g, seed_stream(6, s)), g, 50, 50);
    sum += t.tau.atoms.contains(50) ? t.tau.atoms.at(50) : 0.0;
  }
  CHECK(std::abs(sum / seeds - g[50]) <= 3 * std::sqrt(g[50] / seeds));
}

TEST_CASE("concentration with a single atom") {
  const auto w = WeightSequence::make(Table{{5.0}}, 1);
  ConcentrationParams p;
  p.first = p.last = 1;
  p.trials = 4000;
  p.master_seed = 3;
  const std::vector<double> psi{0.0};
  const auto r = concentration_check(w, psi, p);
  CHECK(std::abs(r.fluctuation_mean - oracle::folded_poisson_mean(5.0)) <= 3 * r.fluctuation_stderr);
  CHECK(oracle::folded_poisson_mean(5.0) == doctest::Approx(1.7547).epsilon(1e-4));
}

TEST_CASE("a block with sigma = 0 is rejected") {
  const auto w = WeightSequence::make(Table{{0.0, 0.0}}, 2);
  ConcentrationParams p;
  p.first = 1;
  p.last = 2;
  const std::vector<double> psi{0.0, 0.0};
  CHECK_THROWS_AS(concentration_check(w, psi, p), ValidationError);
}

TEST_CASE("growing weights on a dyadic block concentrate") {
  const auto w = WeightSequence::make(Growing{GrowthLaw::power, 1.0, 0.75}, 8191);
  const auto phi = LacunaryPhase::make(2.0, 3, 3);
  ConcentrationParams p;
  p.first = 4096;
  p.last = 8191;
  p.r = phi.a_norm();
  p.trials = 100;
  p.master_seed = 17;
  const auto psi = dilated_phase(phi, p.first, p.last);
  CHECK(psi.size() == 4096);
  CHECK(psi[0] == doctest::Approx(-phi(0.0)));
  const auto r = concentration_check(w, psi, p);
  CHECK(r.sigma_inequality);
  CHECK(r.target_fraction >= 0.9);
  CHECK(r.tau_mass_mean == doctest::Approx(r.sigma_mass).epsilon(0.02));
}
