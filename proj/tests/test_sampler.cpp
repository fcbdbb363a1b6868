#include <doctest.h>

#include <cmath>
#include <unordered_set>

#include "bohrlab/errors.hpp"
#include "bohrlab/rng.hpp"
#include "bohrlab/sampler.hpp"
#include "bohrlab/stats.hpp"
#include "oracles.hpp"

using namespace bohrlab;

TEST_CASE("zero weights give empty samples") {
  const auto w = WeightSequence::make(Table{std::vector<double>(50, 0.0)}, 50);
  CHECK(sample_poisson(w, 7).empty());
  CHECK(sample_bernoulli(w, 7).empty());
}

TEST_CASE("samples are deterministic in the seed") {
  const auto w = WeightSequence::make(Harmonic{1.0}, 10000);
  CHECK(sample_poisson(w, 42) == sample_poisson(w, 42));
  CHECK(sample_bernoulli(w, 42) == sample_bernoulli(w, 42));
  CHECK(sample_poisson(w, 42).elements() != sample_poisson(w, 43).elements());
}

TEST_CASE("truncations are nested") {
  const auto w = WeightSequence::make(Harmonic{3.0}, 5000);
  const auto full = sample_poisson(w, 9);
  const auto part = sample_poisson(w, 9, 1000);
  CHECK(part.elements() == full.elements(1000));
  const auto range = sample_poisson_range(w, 9, 200, 800);
  for (const auto& m : range) CHECK(full.multiplicity(m.n) == m.multiplicity);
  CHECK(static_cast<std::int64_t>(range.size()) == full.count_upto(800) - full.count_upto(199));
}

TEST_CASE("bernoulli is the indicator of the poisson sample") {
  const auto w = WeightSequence::make(Harmonic{4.0}, 3000);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = sample_poisson(w, seed);
    const auto b = sample_bernoulli(w, seed);
    CHECK(p.elements() == b.elements());
    for (const auto& m : b.members()) {
      CHECK(m.multiplicity == 1);
      CHECK(site_selected(w, seed, m.n));
    }
  }
}

TEST_CASE("members are strictly increasing with positive multiplicity") {
  const auto w = WeightSequence::make(Table{std::vector<double>(200, 3.0)}, 200);
  const auto s = sample_poisson(w, 5);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.members()[i].multiplicity >= 1);
    if (i) CHECK(s.members()[i].n > s.members()[i - 1].n);
  }
}

TEST_CASE("large weights include every site with probability 1 - e^-20") {
  const auto w = WeightSequence::make(Table{std::vector<double>(5, 20.0)}, 5);
  const std::int64_t seeds = 10000;
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < seeds; ++s) hits += sample_poisson(w, seed_stream(1, s)).count_upto(5);
  const double p = -std::expm1(-20.0);
  const double freq = static_cast<double>(hits) / static_cast<double>(5 * seeds);
  CHECK(std::abs(freq - p) <= 3 * binomial_sigma(p, 5 * seeds) + 1e-12);
}

TEST_CASE("inclusion frequency at n = 1 matches 1 - 1/e") {
  const auto w = WeightSequence::make(Harmonic{1.0}, 1);
  const std::int64_t seeds = 100000;
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < seeds; ++s) hits += site_selected(w, seed_stream(2, s), 1);
  const double p = 1.0 - std::exp(-1.0);
  CHECK(std::abs(static_cast<double>(hits) / seeds - p) <= 3 * binomial_sigma(p, seeds));
}

TEST_CASE("poisson multiplicities have the right mean and variance") {
  for (double lambda : {0.3, 4.0, 25.0}) {
    RunningMoments m;
    for (std::int64_t s = 0; s < 40000; ++s)
      m.add(static_cast<double>(poisson_at_site(lambda, std::exp(-lambda), seed_stream(3, s), 1)));
    CHECK(std::abs(m.mean() - lambda) <= 4 * std::sqrt(lambda / 40000.0));
    CHECK(m.variance() == doctest::Approx(lambda).epsilon(0.05));
  }
}

TEST_CASE("union adds multiplicities") {
  const RandomSet a(10, {{2, 1}, {5, 1}}, 1, SampleSource::poisson);
  const RandomSet b(10, {{5, 2}, {7, 1}}, 2, SampleSource::poisson);
  const auto u = unite(a, b);
  CHECK(u.members().size() == 3);
  CHECK(u.multiplicity(2) == 1);
  CHECK(u.multiplicity(5) == 3);
  CHECK(u.multiplicity(7) == 1);
  CHECK_FALSE(u.overlapping_seeds());
  CHECK(unite(a, RandomSet(10, {}, 3, SampleSource::poisson)).elements() == a.elements());
  CHECK(unite(a, a).overlapping_seeds());
  CHECK_THROWS_AS(unite(a, RandomSet(11, {}, 3, SampleSource::poisson)), ValidationError);
}

TEST_CASE("expected count") {
  CHECK(expected_count(WeightSequence::make(Table{{0.0, 0.0}}, 2), 2) == 0.0);
  const auto h = WeightSequence::make(Harmonic{1.0}, 1000000);
  CHECK(expected_count(h, 1000) == doctest::Approx(6.8262).epsilon(1e-4));
  CHECK(expected_count(h, 1000) == doctest::Approx(oracle::expected_count([](auto n) { return 1.0 / n; }, 1000)));
  for (double alpha : {0.5, 2.0}) {
    const auto w = WeightSequence::make(Harmonic{alpha}, 1000000);
    CHECK(expected_count(w, 1000000) / std::log(1e6) == doctest::Approx(alpha).epsilon(0.05));
  }
}

TEST_CASE("seed stream") {
  CHECK(seed_stream(0, 0) != seed_stream(0, 1));
  CHECK(seed_stream(5, 77) == seed_stream(5, 77));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(2000000);
  for (std::uint64_t i = 0; i < 1000000; ++i) seen.insert(seed_stream(12345, i));
  CHECK(seen.size() == 1000000);
}
