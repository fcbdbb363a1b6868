#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bohrlab/bohr.hpp"
#include "bohrlab/errors.hpp"
#include "bohrlab/rng.hpp"

using namespace bohrlab;

namespace {

RandomSet multiples(std::int64_t step, std::int64_t N) {
  std::vector<std::int64_t> v;
  for (std::int64_t n = step; n <= N; n += step) v.push_back(n);
  return RandomSet::of(N, v);
}

}  // namespace

TEST_CASE("torus points are exact") {
  const auto t = TorusPoint::rational(7, 3);
  CHECK(t.numerator() == 1);
  CHECK(t.denominator() == 3);
  CHECK(TorusPoint::rational(-1, 4).value() == doctest::Approx(0.75));
  const auto s = TorusPoint::named(NamedIrrational::sqrt2_minus_1);
  CHECK(s.value() == doctest::Approx(std::numbers::sqrt2 - 1).epsilon(1e-15));
  CHECK(TorusPoint::named(NamedIrrational::golden).value() == doctest::Approx(std::numbers::phi - 1).epsilon(1e-15));
  CHECK(TorusPoint::named(NamedIrrational::e_minus_2).value() == doctest::Approx(std::numbers::e - 2).epsilon(1e-15));
  // n t mod 1 stays accurate far beyond double precision of n * t.
  const std::int64_t n = 1'000'000'007;
  const long double direct = static_cast<long double>(n) * (std::sqrt(2.0L) - 1.0L);
  CHECK(s.multiple(n) == doctest::Approx(static_cast<double>(direct - std::floor(direct))).epsilon(1e-6));
  CHECK(parse_irrational(irrational_name(NamedIrrational::golden)) == NamedIrrational::golden);
}

TEST_CASE("arcs wrap around zero") {
  const auto a = Arc::make(0.9, 0.2);
  CHECK(a.contains(0.95));
  CHECK(a.contains(0.05));
  CHECK_FALSE(a.contains(0.5));
  CHECK_THROWS_AS(Arc::make(0.0, 0.0), ValidationError);
  CHECK_THROWS_AS(Arc::make(0.0, 1.5), ValidationError);
}

TEST_CASE("orbit hits") {
  const auto all = RandomSet::full(10000);
  const auto golden = TorusPoint::named(NamedIrrational::golden);
  const auto r = orbit_hit(all, golden, Arc::make(0.3, 0.01), 10000);
  REQUIRE(r.first_hit);
  CHECK(Arc::make(0.3, 0.01).contains(golden.multiple(*r.first_hit)));

  std::int64_t count = 0;
  for (std::int64_t n = 1; n <= 10000; ++n) count += Arc::make(0.3, 0.01).contains(golden.multiple(n));
  CHECK(r.hit_count == count);

  const auto evens = multiples(2, 1000);
  CHECK_FALSE(orbit_hit(evens, TorusPoint::rational(1, 2), Arc::make(0.25, 0.5), 1000).first_hit);
}

TEST_CASE("one-dimensional boxes reduce to orbit_hit") {
  const auto w = WeightSequence::make(Harmonic{3.0}, 10000);
  const auto set = sample_poisson(w, 4);
  const auto t = TorusPoint::named(NamedIrrational::e_minus_2);
  const auto I = Arc::make(0.6, 0.1);
  const auto a = orbit_hit(set, t, I, 10000);
  const std::vector<TorusPoint> ts{t};
  const std::vector<Arc> box{I};
  const auto b = multidim_orbit_hit(set, ts, box, 10000);
  CHECK(a.first_hit == b.first_hit);
  CHECK(a.hit_count == b.hit_count);
}

TEST_CASE("multidimensional orbits") {
  const std::vector<TorusPoint> independent{TorusPoint::named(NamedIrrational::sqrt2_minus_1),
                                            TorusPoint::from_double(std::sqrt(3.0) - 1)};
  const std::vector<Arc> box{Arc::make(0.2, 0.5), Arc::make(0.4, 0.5)};
  CHECK(multidim_orbit_hit(RandomSet::full(10000), independent, box, 10000).first_hit);

  const std::vector<TorusPoint> rational{TorusPoint::rational(1, 2), TorusPoint::rational(1, 3)};
  const std::vector<Arc> away{Arc::make(0.1, 0.8), Arc::make(0.1, 0.8)};
  CHECK_FALSE(multidim_orbit_hit(multiples(6, 6000), rational, away, 6000).first_hit);
}

TEST_CASE("hit probability ladders") {
  const auto t = TorusPoint::named(NamedIrrational::sqrt2_minus_1);
  const std::vector<std::int64_t> ladder{100, 1000, 10000, 100000};
  const auto w = WeightSequence::make(Harmonic{3.0}, 100000);
  const auto high = hit_probability(w, t, Arc::make(0.25, 0.5), ladder, 400, 21);
  for (std::size_t i = 1; i < high.size(); ++i) CHECK(high[i].estimate >= high[i - 1].estimate);
  CHECK(high.back().estimate > 0.98);
  for (const auto& p : high) {
    CHECK(p.ci.low <= p.estimate);
    CHECK(p.estimate <= p.ci.high);
  }

  const auto w_low = WeightSequence::make(Harmonic{1.0}, 100000);
  const auto low = hit_probability(w_low, t, Arc::make(0.25, 0.5), ladder, 400, 21);
  CHECK(low.front().estimate < high.front().estimate);
  CHECK(low.front().estimate < 0.99);

  const auto circle = hit_probability(w_low, t, Arc::make(0.0, 1.0), ladder, 400, 21);
  CHECK(circle.back().estimate == 1.0);
  CHECK_THROWS_AS(hit_probability(w, t, Arc::make(0, 0.5), ladder, 50, 1), ValidationError);
}

TEST_CASE("bohr neighborhoods") {
  const std::vector<TorusPoint> one{TorusPoint::named(NamedIrrational::golden)};
  const BohrNeighborhood near_zero{{BohrConstraint{one[0], {1.0, 0.0}, 0.5}}};
  const auto hit = bohr_neighborhood_hit(RandomSet::full(1000), near_zero, 1000);
  REQUIRE(hit);
  CHECK(std::abs(std::polar(1.0, 2 * std::numbers::pi * one[0].multiple(*hit)) - 1.0) < 0.5);

  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TorusPoint> taus;
  for (int i = 0; i < 4; ++i) taus.push_back(TorusPoint::from_double(u(gen)));
  const auto U = planted_neighborhood(4321, taus, 1e-9);
  CHECK(U.contains(4321));
  const auto planted = bohr_neighborhood_hit(RandomSet::of(10000, {17, 4321, 9000}), U, 10000);
  REQUIRE(planted);
  CHECK(U.contains(*planted));
  CHECK_THROWS_AS(bohr_neighborhood_hit(RandomSet::full(10), BohrNeighborhood{}, 10), ValidationError);
}

TEST_CASE("growing weights meet random bohr neighborhoods") {
  const auto w = WeightSequence::make(Growing{GrowthLaw::power, 1.0, 0.75}, 1000000);
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int hits = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    BohrNeighborhood U;
    for (int i = 0; i < 3; ++i)
      U.constraints.push_back({TorusPoint::from_double(u(gen)), std::polar(1.0, 2 * std::numbers::pi * u(gen)), 0.3});
    hits += bohr_neighborhood_hit(sample_poisson(w, seed_stream(31, s)), U, 1000000).has_value();
  }
  CHECK(hits >= 190);
}

TEST_CASE("open set excludes small-denominator rationals") {
  CHECK_FALSE(in_open_set(0.0, 2, 0.1));
  CHECK_FALSE(in_open_set(0.5, 2, 0.1));
  CHECK(in_open_set(0.3, 2, 0.1));
}

TEST_CASE("miss probability is a product over the orbit") {
  const Arc J = Arc::make(0.3, 0.4);
  const std::vector<std::int64_t> ladder{10, 50};
  const double t = 0.137;
  const auto p = miss_probability(t, 2.0, J, ladder);
  double s = 0.0;
  for (std::int64_t n = 1; n <= 50; ++n) {
    const double x = n * t - std::floor(n * t);
    if (x >= 0.3 && x < 0.7) s += 1.0 / n;
    if (n == 10) CHECK(p[0] == doctest::Approx(std::exp(-2.0 * s)));
  }
  CHECK(p[1] == doctest::Approx(std::exp(-2.0 * s)));
}

TEST_CASE("grid procedure") {
  GridProcedureParams g;
  g.trials = 2048;
  g.ladder = {100, 1000, 10000};
  g.offset_candidates = 16;
  g.grid_budget = 1e8;
  const auto r = grid_procedure(g);
  CHECK(r.inner.start == doctest::Approx(0.3));
  CHECK(r.inner.length == doctest::Approx(0.4));
  CHECK(r.ladder[0].M == 2000);
  CHECK(r.ladder[2].M == 200000);
  CHECK(r.covering_ok);
  CHECK(r.spacing <= g.d);
  CHECK(r.beta_hat >= 1.2);
  for (std::size_t i = 1; i < r.ladder.size(); ++i) CHECK(r.ladder[i].scaled_bound < r.ladder[i - 1].scaled_bound);
  CHECK(r.minorant.sup_error >= 0.0);
  CHECK(r.g_measure > 0.5);
  CHECK(r.g_measure < 1.0);

  GridProcedureParams bad = g;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(grid_procedure(bad), ValidationError);
}
