#include "bohrlab/sidon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <fmt/format.h>

#include "bohrlab/errors.hpp"
#include "int128.hpp"

namespace bohrlab {
namespace {

constexpr std::size_t kMaxSearchSet = 64;

struct HalfEntry {
  std::uint32_t plus = 0;
  std::uint32_t minus = 0;
  int support = 0;
};

// Number of signed vectors over h coordinates with at most L nonzeros.
double signed_vector_count(std::size_t h, std::size_t L) {
  double total = 0.0;
  double binom = 1.0;
  double pow2 = 1.0;
  for (std::size_t k = 0; k <= std::min(h, L); ++k) {
    total += binom * pow2;
    binom = binom * static_cast<double>(h - k) / static_cast<double>(k + 1);
    pow2 *= 2.0;
  }
  return total;
}

// Depth-first enumeration of signed vectors with bounded support. The visitor
// returns true to stop; enumerate returns true if stopped.
template <class Visit>
bool enumerate_signed(std::span<const std::int64_t> elems, std::size_t max_support, Visit&& visit) {
  struct Frame {
    std::size_t index;
    std::int64_t sum;
    std::uint32_t plus;
    std::uint32_t minus;
    int support;
  };
  std::vector<Frame> stack;
  stack.push_back({0, 0, 0, 0, 0});
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.index == elems.size()) {
      if (visit(f.sum, f.plus, f.minus, f.support)) return true;
      continue;
    }
    const std::uint32_t bit = 1U << f.index;
    const std::int64_t x = elems[f.index];
    // Pushed in reverse so the zero coefficient is explored first.
    if (static_cast<std::size_t>(f.support) < max_support) {
      stack.push_back({f.index + 1, f.sum - x, f.plus, f.minus | bit, f.support + 1});
      stack.push_back({f.index + 1, f.sum + x, f.plus | bit, f.minus, f.support + 1});
    }
    stack.push_back({f.index + 1, f.sum, f.plus, f.minus, f.support});
  }
  return false;
}

void check_elements(std::span<const std::int64_t> set) {
  for (auto x : set) require(x > 0, "relation search: elements must be positive integers");
  std::vector<std::int64_t> sorted(set.begin(), set.end());
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "relation search: duplicate element");
}

void check_set(std::span<const std::int64_t> set) {
  require(!set.empty(), "relation search: empty set");
  require(set.size() <= kMaxSearchSet, "relation search: more than 64 elements; search windows instead");
  check_elements(set);
}

std::vector<int> assemble(std::size_t size, std::size_t half, const HalfEntry& a, std::uint32_t b_plus,
                          std::uint32_t b_minus) {
  std::vector<int> coeffs(size, 0);
  for (std::size_t i = 0; i < half; ++i) {
    if (a.plus >> i & 1U) coeffs[i] = 1;
    if (a.minus >> i & 1U) coeffs[i] = -1;
  }
  for (std::size_t i = half; i < size; ++i) {
    if (b_plus >> (i - half) & 1U) coeffs[i] = 1;
    if (b_minus >> (i - half) & 1U) coeffs[i] = -1;
  }
  return coeffs;
}

// Core meet-in-the-middle search for sum eps_i set[i] == target with at most
// max_support nonzeros; the all-zero vector is excluded when target == 0.
std::optional<std::vector<int>> mitm_search(std::span<const std::int64_t> set, std::int64_t target,
                                            std::size_t max_support, const SearchLimits& limits) {
  check_set(set);
  const std::size_t n = set.size();
  if (max_support >= n && n > limits.exhaustive_cap) {
    throw CapacityError(fmt::format(
        "relation search: exhaustive search over {} elements exceeds the cap of {}; lower the support bound", n,
        limits.exhaustive_cap));
  }
  const std::size_t half = n / 2;
  const auto front = set.first(half);
  const auto back = set.subspan(half);
  const double stored = signed_vector_count(front.size(), max_support);
  const double probed = signed_vector_count(back.size(), max_support);
  const double cap = static_cast<double>(limits.max_index_entries);
  if (stored > cap || probed > 3.0 * cap) {
    throw CapacityError(fmt::format(
        "relation search: {} elements with support <= {} needs {:.0f} index entries (cap {}); lower the support bound",
        n, max_support, stored, limits.max_index_entries));
  }

  std::unordered_map<std::int64_t, HalfEntry> index;
  index.reserve(static_cast<std::size_t>(stored));
  std::optional<std::vector<int>> found;

  const bool stopped = enumerate_signed(front, max_support, [&](std::int64_t sum, std::uint32_t plus,
                                                               std::uint32_t minus, int support) {
    if (target == 0 && sum == 0 && support > 0) {
      found = assemble(n, half, HalfEntry{plus, minus, support}, 0, 0);
      return true;
    }
    auto [it, inserted] = index.try_emplace(sum, HalfEntry{plus, minus, support});
    if (!inserted && support < it->second.support) it->second = HalfEntry{plus, minus, support};
    return false;
  });
  if (stopped) return found;

  enumerate_signed(back, max_support, [&](std::int64_t sum, std::uint32_t plus, std::uint32_t minus, int support) {
    if (target == 0 && support == 0) return false;
    auto it = index.find(target - sum);
    if (it == index.end()) return false;
    if (static_cast<std::size_t>(it->second.support + support) > max_support) return false;
    found = assemble(n, half, it->second, plus, minus);
    return true;
  });
  return found;
}

Relation to_relation(std::span<const std::int64_t> set, const std::vector<int>& coeffs) {
  std::vector<std::pair<std::int64_t, int>> terms;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (coeffs[i] != 0) terms.emplace_back(set[i], coeffs[i]);
  }
  std::sort(terms.begin(), terms.end());
  Relation rel;
  const int flip = terms.back().second == 1 ? -1 : 1;
  for (const auto& [x, c] : terms) {
    rel.support.push_back(x);
    rel.coefficients.push_back(c * flip);
  }
  return rel;
}

}  // namespace

bool Relation::valid() const {
  if (support.empty() || support.size() != coefficients.size()) return false;
  bool nonzero = false;
  i128 sum = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (i > 0 && support[i] <= support[i - 1]) return false;
    const int c = coefficients[i];
    if (c < -1 || c > 1) return false;
    nonzero = nonzero || c != 0;
    sum += static_cast<i128>(c) * support[i];
  }
  return nonzero && sum == 0;
}

std::string Relation::to_string() const {
  std::string out;
  bool first = true;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const int c = coefficients[i];
    if (c == 0) continue;
    if (first) {
      out += fmt::format("{}{}", c < 0 ? "-" : "", support[i]);
    } else {
      out += fmt::format(" {} {}", c < 0 ? "-" : "+", support[i]);
    }
    first = false;
  }
  return out + " = 0";
}

std::optional<Relation> find_relation(std::span<const std::int64_t> set, std::size_t max_support,
                                      const SearchLimits& limits) {
  require(max_support >= 1, "find_relation: support bound must be >= 1");
  std::vector<std::int64_t> sorted(set.begin(), set.end());
  std::sort(sorted.begin(), sorted.end());
  auto coeffs = mitm_search(sorted, 0, std::min(max_support, sorted.size()), limits);
  if (!coeffs) return std::nullopt;
  return to_relation(sorted, *coeffs);
}

std::optional<std::vector<int>> find_signed_sum(std::span<const std::int64_t> set, std::int64_t target,
                                                std::size_t max_support, const SearchLimits& limits) {
  if (set.empty()) return std::nullopt;
  return mitm_search(set, target, std::min(max_support, set.size()), limits);
}

RelationScan scan_relations(std::span<const std::int64_t> set, const SearchLimits& limits) {
  std::vector<std::int64_t> sorted(set.begin(), set.end());
  std::sort(sorted.begin(), sorted.end());
  RelationScan scan;
  check_elements(sorted);
  if (sorted.size() < 3) {
    // Two distinct positive integers admit no vanishing signed sum.
    scan.certified = true;
    return scan;
  }
  const std::size_t cap = limits.exhaustive_cap;
  if (sorted.size() <= cap) {
    scan.relation = find_relation(sorted, sorted.size(), limits);
    scan.certified = true;
    scan.windows_searched = 1;
    return scan;
  }
  const std::span<const std::int64_t> all(sorted);
  scan.relation = find_relation(all.first(cap), cap, limits);
  scan.windows_searched = 1;
  if (scan.relation) {
    scan.certified = true;
    return scan;
  }
  const std::size_t stride = std::max<std::size_t>(1, cap / 2);
  for (std::size_t start = stride;; start += stride) {
    const std::size_t len = std::min(cap, sorted.size() - start);
    scan.relation = find_relation(all.subspan(start, len), limits.bounded_support, limits);
    ++scan.windows_searched;
    if (scan.relation) {
      scan.certified = true;
      return scan;
    }
    if (start + len >= sorted.size()) break;
  }
  scan.certified = false;
  return scan;
}

QiDecomposition qi_decompose(std::span<const std::int64_t> set, const SearchLimits& limits) {
  std::vector<std::int64_t> sorted(set.begin(), set.end());
  std::sort(sorted.begin(), sorted.end());
  check_elements(sorted);

  QiDecomposition out;
  const std::size_t cap = limits.exhaustive_cap;
  for (auto x : sorted) {
    bool placed = false;
    for (auto& part : out.parts) {
      std::optional<std::vector<int>> rep;
      if (part.size() + 1 <= cap) {
        rep = find_signed_sum(part, x, part.size(), limits);
      } else {
        const std::span<const std::int64_t> tail = std::span<const std::int64_t>(part).last(cap - 1);
        rep = find_signed_sum(tail, x, limits.bounded_support - 1, limits);
        out.certified = false;
      }
      if (!rep) {
        part.push_back(x);
        placed = true;
        break;
      }
    }
    if (!placed) out.parts.push_back({x});
  }
  return out;
}

CountingProfile counting_profile(const RandomSet& set, std::span<const std::int64_t> checkpoints) {
  CountingProfile profile;
  std::int64_t prev = 0;
  for (auto N : checkpoints) {
    require(N >= 1 && N <= set.horizon(), "counting_profile: checkpoint outside [1, horizon]");
    require(N > prev, "counting_profile: checkpoints must be increasing");
    prev = N;
    const std::int64_t count = set.count_upto(N);
    profile.checkpoints.push_back(N);
    profile.counts.push_back(count);
    profile.ratios.push_back(N >= 2 ? static_cast<double>(count) / std::log(static_cast<double>(N))
                                    : std::numeric_limits<double>::quiet_NaN());
  }
  return profile;
}

std::string verdict_name(SidonVerdict verdict) {
  switch (verdict) {
    case SidonVerdict::not_sidon_counting: return "not Sidon (counting)";
    case SidonVerdict::sidon_consistent: return "Sidon-consistent (QI decomposition)";
    case SidonVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

SidonReport sidon_verdict(const RandomSet& set, std::span<const std::int64_t> checkpoints,
                          const SidonVerdictOptions& options) {
  require(!checkpoints.empty(), "sidon_verdict: no checkpoints");
  SidonReport report;
  report.profile = counting_profile(set, checkpoints);

  double first_ratio = 0.0;
  for (std::size_t i = 0; i < report.profile.ratios.size(); ++i) {
    const double r = report.profile.ratios[i];
    if (std::isfinite(r) && r > 0) {
      first_ratio = r;
      break;
    }
  }
  const double last_ratio = report.profile.ratios.back();
  report.ratio_growth = first_ratio > 0 && std::isfinite(last_ratio) ? last_ratio / first_ratio : 0.0;
  if (report.profile.counts.back() >= options.min_count && report.ratio_growth >= options.growth_factor) {
    report.verdict = SidonVerdict::not_sidon_counting;
    return report;
  }

  const auto elems = set.elements(checkpoints.back());
  const auto decomposition = qi_decompose(elems, options.limits);
  report.part_count = decomposition.part_count();
  report.decomposition_certified = decomposition.certified;
  report.relation = scan_relations(elems, options.limits).relation;
  report.verdict = report.part_count <= options.max_parts ? SidonVerdict::sidon_consistent
                                                          : SidonVerdict::inconclusive;
  return report;
}

}  // namespace bohrlab
