#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "bohrlab/errors.hpp"
#include "bohrlab/rng.hpp"
#include "bohrlab/sidon.hpp"
#include "oracles.hpp"

using namespace bohrlab;

namespace {

std::int64_t signed_sum(const Relation& r) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < r.support.size(); ++i) s += r.coefficients[i] * r.support[i];
  return s;
}

std::vector<std::int64_t> random_set(std::mt19937_64& gen, std::size_t size, std::int64_t range) {
  std::uniform_int_distribution<std::int64_t> pick(1, range);
  std::set<std::int64_t> s;
  while (s.size() < size) s.insert(pick(gen));
  return {s.begin(), s.end()};
}

}  // namespace

TEST_CASE("3 + 5 = 8") {
  const std::vector<std::int64_t> s{3, 5, 8};
  const auto r = find_relation(s, 3);
  REQUIRE(r);
  CHECK(r->support == s);
  CHECK(r->coefficients == std::vector<int>{1, 1, -1});
  CHECK(r->valid());
  CHECK(r->to_string() == "3 + 5 - 8 = 0");
}

TEST_CASE("powers of two and three are quasi-independent") {
  const std::vector<std::int64_t> twos{1, 2, 4, 8, 16};
  const std::vector<std::int64_t> threes{1, 3, 9, 27};
  CHECK_FALSE(find_relation(twos, twos.size()));
  CHECK_FALSE(find_relation(threes, threes.size()));
  CHECK_FALSE(oracle::has_relation(twos));
  CHECK_FALSE(oracle::has_relation(threes));
}

TEST_CASE("relation search agrees with the 3^n enumeration") {
  std::mt19937_64 gen(2024);
  int disagreements = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto size = static_cast<std::size_t>(1 + trial % 12);
    const auto s = random_set(gen, size, trial % 2 ? 200 : 5000);
    const auto r = find_relation(s, s.size());
    if (r.has_value() != oracle::has_relation(s)) ++disagreements;
    if (r) {
      CHECK(r->valid());
      CHECK(signed_sum(*r) == 0);
    }
  }
  CHECK(disagreements == 0);
}

TEST_CASE("bounded support only finds short relations") {
  const std::vector<std::int64_t> s{1, 2, 4, 8, 15};  // 1 + 2 + 4 + 8 - 15
  CHECK(find_relation(s, 5));
  CHECK_FALSE(find_relation(s, 4));
}

TEST_CASE("signed subset sum") {
  const std::vector<std::int64_t> s{3, 10, 24};
  const auto c = find_signed_sum(s, 17, 3);
  REQUIRE(c);
  std::int64_t total = 0;
  for (std::size_t i = 0; i < s.size(); ++i) total += (*c)[i] * s[i];
  CHECK(total == 17);
  CHECK_FALSE(find_signed_sum(s, 2, 3));
}

TEST_CASE("capacity limits") {
  std::vector<std::int64_t> big;
  for (std::int64_t i = 0; i < 30; ++i) big.push_back(1000 + 37 * i);
  CHECK_THROWS_AS(find_relation(big, big.size()), CapacityError);
  const auto scan = scan_relations(big);
  CHECK(scan.relation);
  CHECK(scan.relation->valid());
}

TEST_CASE("scan certificates") {
  const std::vector<std::int64_t> threes{1, 3, 9, 27, 81, 243};
  const auto scan = scan_relations(threes);
  CHECK_FALSE(scan.relation);
  CHECK(scan.certified);
  std::vector<std::int64_t> many;
  for (int k = 0; k < 30; ++k) many.push_back(std::int64_t{1} << k);
  const auto big = scan_relations(many);
  CHECK_FALSE(big.relation);
  CHECK_FALSE(big.certified);
  CHECK(big.windows_searched > 1);
}

TEST_CASE("quasi-independent decomposition") {
  const std::vector<std::int64_t> threes{1, 3, 9, 27};
  const auto one = qi_decompose(threes);
  CHECK(one.part_count() == 1);
  CHECK(one.parts[0] == threes);
  const std::vector<std::int64_t> s{1, 2, 3};
  const auto two = qi_decompose(s);
  CHECK(two.part_count() == 2);
  CHECK(two.certified);
  for (const auto& part : two.parts) CHECK_FALSE(oracle::has_relation(part));
}

TEST_CASE("every part of a decomposition passes the exhaustive check") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_set(gen, 12, 60);
    const auto d = qi_decompose(s);
    std::size_t total = 0;
    for (const auto& part : d.parts) {
      CHECK_FALSE(oracle::has_relation(part));
      total += part.size();
    }
    CHECK(total == s.size());
  }
}

TEST_CASE("the powers of three in a mixed sample form one quasi-independent part") {
  const auto w = WeightSequence::make(MixedCounterexample{0.5, 3, 1.0}, 100000);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto set = sample_poisson(w, seed_stream(11, seed));
    std::vector<std::int64_t> powers;
    for (auto n : set.elements()) {
      std::int64_t x = n;
      while (x % 3 == 0) x /= 3;
      if (x == 1 && n > 1) powers.push_back(n);
    }
    CHECK_FALSE(oracle::has_relation(powers));
    const auto d = qi_decompose(set.elements());
    CHECK(d.part_count() <= 6);
  }
}

TEST_CASE("counting profile") {
  const std::vector<std::int64_t> checkpoints{10, 100};
  const auto empty = counting_profile(RandomSet(100, {}, 0, SampleSource::poisson), checkpoints);
  CHECK(empty.counts == std::vector<std::int64_t>{0, 0});
  const auto full = counting_profile(RandomSet::full(100), checkpoints);
  CHECK(full.counts == std::vector<std::int64_t>{10, 100});
  CHECK(full.ratios[1] == doctest::Approx(21.715).epsilon(1e-4));
}

TEST_CASE("harmonic(2) counting ratios average near 2") {
  const auto w = WeightSequence::make(Harmonic{2.0}, 1000000);
  const std::vector<std::int64_t> checkpoints{100, 10000, 1000000};
  double sum = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto p = counting_profile(sample_poisson(w, seed_stream(99, s)), checkpoints);
    for (std::size_t i = 1; i < p.counts.size(); ++i) CHECK(p.counts[i] >= p.counts[i - 1]);
    sum += p.ratios.back();
  }
  CHECK(sum / 100 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("sidon verdicts") {
  const std::vector<std::int64_t> checkpoints{1000, 1000000};
  const auto growing = WeightSequence::make(Growing{GrowthLaw::log, 1.0, 0.5}, 1000000);
  CHECK(sidon_verdict(sample_poisson(growing, 3), checkpoints).verdict == SidonVerdict::not_sidon_counting);

  const auto finite = sidon_verdict(RandomSet::of(3, {1, 2, 3}), std::vector<std::int64_t>{2, 3});
  CHECK(finite.verdict == SidonVerdict::sidon_consistent);
  CHECK(finite.part_count == 2);

  const auto h = WeightSequence::make(Harmonic{0.3}, 1000000);
  int consistent = 0, single = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto report = sidon_verdict(sample_poisson(h, seed_stream(5, s)), checkpoints);
    consistent += report.verdict == SidonVerdict::sidon_consistent;
    single += report.part_count <= 1;
  }
  CHECK(consistent >= 180);
  CHECK(single > 100);
}
