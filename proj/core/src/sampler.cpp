#include "bohrlab/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "bohrlab/errors.hpp"
#include "bohrlab/rng.hpp"

namespace bohrlab {
namespace {

// Hormann's PTRS, restricted to k >= 1.
std::int64_t ptrs_positive(double lambda, SiteRng& rng) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const auto k = static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + lambda + 0.43));
    if (k < 1) continue;
    if (us >= 0.07 && v <= vr) return k;
    if (us < 0.013 && v > us) continue;
    const double kd = static_cast<double>(k);
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <= -lambda + kd * loglam - std::lgamma(kd + 1.0)) {
      return k;
    }
  }
}

std::int64_t resolve_horizon(const WeightSequence& w, std::int64_t horizon) {
  if (horizon == 0) return w.horizon();
  require(horizon >= 1 && horizon <= w.horizon(), "sample: horizon must lie in [1, weights horizon]");
  return horizon;
}

}  // namespace

std::string source_name(SampleSource source) {
  switch (source) {
    case SampleSource::poisson: return "poisson";
    case SampleSource::bernoulli: return "bernoulli";
    case SampleSource::union_of_samples: return "union";
  }
  return "unknown";
}

SampleSource parse_source(const std::string& name) {
  if (name == "poisson") return SampleSource::poisson;
  if (name == "bernoulli") return SampleSource::bernoulli;
  if (name == "union") return SampleSource::union_of_samples;
  throw ValidationError("unknown sample source '" + name + "'");
}

RandomSet::RandomSet(std::int64_t horizon, std::vector<Member> members, std::uint64_t seed, SampleSource source)
    : horizon_(horizon), members_(std::move(members)), seed_(seed), source_(source) {
  require(horizon_ >= 1, "RandomSet: horizon must be >= 1");
  std::int64_t prev = 0;
  for (const auto& m : members_) {
    require(m.n > prev, "RandomSet: members must be strictly increasing positive integers");
    require(m.n <= horizon_, "RandomSet: member beyond horizon");
    require(m.multiplicity >= 1, "RandomSet: multiplicity must be >= 1");
    if (source_ == SampleSource::bernoulli) require(m.multiplicity == 1, "RandomSet: bernoulli multiplicity must be 1");
    prev = m.n;
  }
}

RandomSet RandomSet::full(std::int64_t horizon) {
  std::vector<Member> members;
  members.reserve(static_cast<std::size_t>(horizon));
  for (std::int64_t n = 1; n <= horizon; ++n) members.push_back({n, 1});
  return RandomSet(horizon, std::move(members), 0, SampleSource::bernoulli);
}

RandomSet RandomSet::of(std::int64_t horizon, std::vector<std::int64_t> elements) {
  std::sort(elements.begin(), elements.end());
  require(std::adjacent_find(elements.begin(), elements.end()) == elements.end(), "RandomSet::of: duplicate element");
  std::vector<Member> members;
  members.reserve(elements.size());
  for (auto n : elements) members.push_back({n, 1});
  return RandomSet(horizon, std::move(members), 0, SampleSource::bernoulli);
}

std::int64_t RandomSet::count_upto(std::int64_t N) const {
  auto it = std::upper_bound(members_.begin(), members_.end(), N,
                             [](std::int64_t value, const Member& m) { return value < m.n; });
  return static_cast<std::int64_t>(it - members_.begin());
}

std::int64_t RandomSet::multiplicity(std::int64_t n) const {
  auto it = std::lower_bound(members_.begin(), members_.end(), n,
                             [](const Member& m, std::int64_t value) { return m.n < value; });
  return (it != members_.end() && it->n == n) ? it->multiplicity : 0;
}

std::vector<std::int64_t> RandomSet::elements(std::int64_t N) const {
  std::vector<std::int64_t> out;
  for (const auto& m : members_) {
    if (m.n > N) break;
    out.push_back(m.n);
  }
  return out;
}

std::int64_t poisson_at_site(double lambda, double survival, std::uint64_t seed, std::int64_t n) {
  SiteRng rng(seed, static_cast<std::uint64_t>(n));
  const double u = rng.uniform();
  if (u < survival) return 0;
  if (lambda >= 10.0) return ptrs_positive(lambda, rng);
  double p = survival;
  double cdf = survival;
  std::int64_t k = 0;
  while (u >= cdf && k < 1000) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cdf += p;
  }
  return std::max<std::int64_t>(k, 1);
}

std::vector<Member> sample_poisson_range(const WeightSequence& w, std::uint64_t seed, std::int64_t first,
                                         std::int64_t last) {
  require(first >= 1 && first <= last && last <= w.horizon(), "sample: range must lie in [1, weights horizon]");
  std::vector<Member> members;
  for (std::int64_t n = first; n <= last; ++n) {
    const double lambda = w[n];
    if (lambda <= 0.0) continue;
    const std::int64_t xi = poisson_at_site(lambda, w.survival(n), seed, n);
    if (xi > 0) members.push_back({n, xi});
  }
  return members;
}

RandomSet sample_poisson(const WeightSequence& w, std::uint64_t seed, std::int64_t horizon) {
  const std::int64_t N = resolve_horizon(w, horizon);
  return RandomSet(N, sample_poisson_range(w, seed, 1, N), seed, SampleSource::poisson);
}

bool site_selected(const WeightSequence& w, std::uint64_t seed, std::int64_t n) {
  if (w[n] <= 0.0) return false;
  SiteRng rng(seed, static_cast<std::uint64_t>(n));
  return rng.uniform() >= w.survival(n);
}

RandomSet sample_bernoulli(const WeightSequence& w, std::uint64_t seed, std::int64_t horizon) {
  const std::int64_t N = resolve_horizon(w, horizon);
  std::vector<Member> members;
  for (std::int64_t n = 1; n <= N; ++n) {
    if (site_selected(w, seed, n)) members.push_back({n, 1});
  }
  return RandomSet(N, std::move(members), seed, SampleSource::bernoulli);
}

RandomSet unite(const RandomSet& a, const RandomSet& b) {
  if (a.horizon() != b.horizon()) throw ValidationError("union: horizon mismatch");
  std::vector<Member> merged;
  merged.reserve(a.size() + b.size());
  auto ia = a.members_.begin();
  auto ib = b.members_.begin();
  while (ia != a.members_.end() || ib != b.members_.end()) {
    if (ib == b.members_.end() || (ia != a.members_.end() && ia->n < ib->n)) {
      merged.push_back(*ia++);
    } else if (ia == a.members_.end() || ib->n < ia->n) {
      merged.push_back(*ib++);
    } else {
      merged.push_back({ia->n, ia->multiplicity + ib->multiplicity});
      ++ia;
      ++ib;
    }
  }
  RandomSet out(a.horizon(), std::move(merged), a.seed(), SampleSource::union_of_samples);
  out.overlapping_seeds_ = a.overlapping_seeds_ || b.overlapping_seeds_ ||
                           (a.seed() == b.seed() && !a.empty() && !b.empty());
  return out;
}

double expected_count(const WeightSequence& w, std::int64_t N) {
  require(N >= 0 && N <= w.horizon(), "expected_count: N beyond weights horizon");
  double sum = 0.0;
  for (std::int64_t n = 1; n <= N; ++n) sum += w.inclusion(n);
  return sum;
}

}  // namespace bohrlab
