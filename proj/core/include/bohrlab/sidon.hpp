#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bohrlab/sampler.hpp"

namespace bohrlab {

/// A vanishing signed sum sum_i coefficients[i] * support[i] = 0.
///
/// Only elements with a nonzero coefficient are kept, support increasing.
/// Signs are normalized so the largest element carries -1.
struct Relation {
  std::vector<std::int64_t> support;
  std::vector<int> coefficients;

  /// Exact integer check of the relation invariants.
  bool valid() const;
  /// "3 + 5 - 8 = 0"
  std::string to_string() const;
};

struct SearchLimits {
  /// Largest set searched exhaustively (two halves of 3^12 signed sums).
  std::size_t exhaustive_cap = 24;
  /// Support bound used once a set is beyond the exhaustive cap.
  std::size_t bounded_support = 8;
  /// Largest half-enumeration stored in the collision index.
  std::size_t max_index_entries = 531'441;  // 3^12
};

/// Meet-in-the-middle search for a relation with at most max_support nonzero
/// coefficients among the elements of `set` (distinct positive integers).
///
/// When max_support >= |set| and |set| <= limits.exhaustive_cap the search is
/// exhaustive and an empty result proves quasi-independence. Throws
/// CapacityError when exhaustive search is requested beyond the cap, or when
/// the bounded enumeration would exceed limits.max_index_entries.
std::optional<Relation> find_relation(std::span<const std::int64_t> set, std::size_t max_support,
                                      const SearchLimits& limits = {});

/// Signed subset sum: coefficients over `set` with sum_i eps_i * set[i] == target,
/// at most max_support nonzero. Same enumeration and capacity rules as find_relation.
std::optional<std::vector<int>> find_signed_sum(std::span<const std::int64_t> set, std::int64_t target,
                                                std::size_t max_support, const SearchLimits& limits = {});

struct RelationScan {
  std::optional<Relation> relation;
  /// True when "no relation" is a proof (the whole set was searched exhaustively).
  bool certified = false;
  std::size_t windows_searched = 0;
};

/// Relation search that scales to large sets.
///
/// Sets within the cap are searched exhaustively. Larger sets are searched
/// exhaustively on their smallest `exhaustive_cap` elements, then in sliding
/// windows (stride cap/2) with bounded support; a miss is reported as
/// "no short relation found", never as a proof.
RelationScan scan_relations(std::span<const std::int64_t> set, const SearchLimits& limits = {});

struct QiDecomposition {
  std::vector<std::vector<std::int64_t>> parts;
  /// False when some insertion check fell back to bounded support.
  bool certified = true;
  std::size_t part_count() const noexcept { return parts.size(); }
};

/// Greedy first-fit split into quasi-independent parts.
///
/// Elements are inserted in increasing order into the lowest-index part that
/// stays relation-free. A part is relation-free and x is new, so x may join
/// exactly when x is not a signed sum of the part's elements.
QiDecomposition qi_decompose(std::span<const std::int64_t> set, const SearchLimits& limits = {});

struct CountingProfile {
  std::vector<std::int64_t> checkpoints;
  std::vector<std::int64_t> counts;
  std::vector<double> ratios;  ///< counts / ln N (NaN for N < 2)
};

CountingProfile counting_profile(const RandomSet& set, std::span<const std::int64_t> checkpoints);

enum class SidonVerdict { not_sidon_counting, sidon_consistent, inconclusive };
std::string verdict_name(SidonVerdict verdict);

struct SidonVerdictOptions {
  /// Counting verdict fires when ratio(last) >= growth_factor * ratio(first).
  double growth_factor = 1.5;
  /// Counting evidence needs at least this many members at the last checkpoint.
  std::int64_t min_count = 20;
  /// QI verdict fires when the decomposition has at most this many parts.
  std::size_t max_parts = 4;
  SearchLimits limits;
};

struct SidonReport {
  SidonVerdict verdict = SidonVerdict::inconclusive;
  CountingProfile profile;
  double ratio_growth = 0.0;
  std::size_t part_count = 0;
  bool decomposition_certified = false;
  std::optional<Relation> relation;  ///< a relation in the truncation, when one was found
};

/// Counting diagnostic first, QI decomposition of the last truncation second.
SidonReport sidon_verdict(const RandomSet& set, std::span<const std::int64_t> checkpoints,
                          const SidonVerdictOptions& options = {});

}  // namespace bohrlab
