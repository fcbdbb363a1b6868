#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bohrlab/weights.hpp"

namespace bohrlab {

enum class SampleSource { poisson, bernoulli, union_of_samples };

std::string source_name(SampleSource source);
SampleSource parse_source(const std::string& name);

struct Member {
  std::int64_t n = 0;
  std::int64_t multiplicity = 1;
  friend bool operator==(const Member&, const Member&) = default;
};

/// One realization of the random set truncated to [1, horizon].
///
/// Members are strictly increasing in n with positive multiplicities; a
/// Bernoulli sample has every multiplicity equal to 1.
class RandomSet {
 public:
  RandomSet() = default;
  /// Validates ordering and multiplicities; throws ValidationError.
  RandomSet(std::int64_t horizon, std::vector<Member> members, std::uint64_t seed, SampleSource source);

  /// Every integer in [1, horizon] with multiplicity 1.
  static RandomSet full(std::int64_t horizon);
  /// Explicit set with unit multiplicities; elements need not be sorted.
  static RandomSet of(std::int64_t horizon, std::vector<std::int64_t> elements);

  std::int64_t horizon() const noexcept { return horizon_; }
  std::uint64_t seed() const noexcept { return seed_; }
  SampleSource source() const noexcept { return source_; }
  std::span<const Member> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }

  /// True when a union was formed from samples sharing a seed.
  bool overlapping_seeds() const noexcept { return overlapping_seeds_; }

  /// |Lambda_N|: number of members n <= N.
  std::int64_t count_upto(std::int64_t N) const;
  /// Multiplicity of n, 0 when absent.
  std::int64_t multiplicity(std::int64_t n) const;
  /// Members n <= N as plain integers.
  std::vector<std::int64_t> elements(std::int64_t N) const;
  std::vector<std::int64_t> elements() const { return elements(horizon_); }

  friend bool operator==(const RandomSet&, const RandomSet&) = default;

 private:
  friend RandomSet unite(const RandomSet& a, const RandomSet& b);

  std::int64_t horizon_ = 0;
  std::vector<Member> members_;
  std::uint64_t seed_ = 0;
  SampleSource source_ = SampleSource::poisson;
  bool overlapping_seeds_ = false;
};

/// Poisson(lambda) variate driven by the site generator.
///
/// The first uniform u decides xi = 0 exactly when u < e^{-lambda}, which
/// couples this draw to the Bernoulli draw at the same (seed, n). Below
/// lambda = 10 the remaining value comes from inversion on the same u; above,
/// a zero-truncated transformed-rejection (PTRS) sampler is used.
std::int64_t poisson_at_site(double lambda, double survival, std::uint64_t seed, std::int64_t n);

/// Independent xi_n ~ Poisson(w_n), n <= horizon (0 selects w.horizon()).
RandomSet sample_poisson(const WeightSequence& w, std::uint64_t seed, std::int64_t horizon = 0);

/// Independent beta_n ~ Bernoulli(1 - e^{-w_n}); beta_n = min(xi_n, 1) for the same seed.
RandomSet sample_bernoulli(const WeightSequence& w, std::uint64_t seed, std::int64_t horizon = 0);

/// beta_n at one site; agrees with membership of n in sample_bernoulli(w, seed).
bool site_selected(const WeightSequence& w, std::uint64_t seed, std::int64_t n);

/// Members of sample_poisson(w, seed) restricted to [first, last].
std::vector<Member> sample_poisson_range(const WeightSequence& w, std::uint64_t seed, std::int64_t first,
                                         std::int64_t last);

/// Set union with additive multiplicities. Throws on horizon mismatch.
RandomSet unite(const RandomSet& a, const RandomSet& b);

/// Sum of 1 - e^{-w_n} over n <= N.
double expected_count(const WeightSequence& w, std::int64_t N);

}  // namespace bohrlab
