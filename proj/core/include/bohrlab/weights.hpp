#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bohrlab {

/// Largest horizon that may be materialized.
inline constexpr std::int64_t kMaxHorizon = 100'000'000;

/// w_n = alpha / n.
struct Harmonic {
  double alpha = 1.0;
};

/// Catalog of weight laws with n * w_n -> infinity.
enum class GrowthLaw {
  power,   ///< alpha * n^(-1 + delta), 0 < delta <= 1
  log,     ///< alpha * log(n + 1) / n
  loglog,  ///< alpha * log(log(n + 3)) / n
};

struct Growing {
  GrowthLaw law = GrowthLaw::log;
  double alpha = 1.0;
  double delta = 0.5;  ///< only read by GrowthLaw::power
};

/// sparse_value on the powers sparse_base^k (k >= 1), background_alpha / n elsewhere.
struct MixedCounterexample {
  double sparse_value = 0.5;
  std::int64_t sparse_base = 3;
  double background_alpha = 1.0;
};

/// Explicit values w_1, w_2, ...
struct Table {
  std::vector<double> values;
};

using WeightKind = std::variant<Harmonic, Growing, MixedCounterexample, Table>;

std::string kind_name(const WeightKind& kind);
std::string growth_law_name(GrowthLaw law);
GrowthLaw parse_growth_law(const std::string& name);

/// Materialized weights w_1..w_N together with the generating kind.
///
/// Values are immutable after construction; e^{-w_n} is cached because the
/// samplers compare against it at every site.
class WeightSequence {
 public:
  /// Throws ValidationError on out-of-range parameters or N outside [1, kMaxHorizon].
  static WeightSequence make(WeightKind kind, std::int64_t horizon);

  /// Wraps explicit values, recording `kind` as their description.
  static WeightSequence from_values(WeightKind kind, std::vector<double> values);

  const WeightKind& kind() const noexcept { return kind_; }
  std::int64_t horizon() const noexcept { return static_cast<std::int64_t>(values_.size()); }

  /// w_n for 1 <= n <= horizon.
  double operator[](std::int64_t n) const { return values_[static_cast<std::size_t>(n - 1)]; }
  /// e^{-w_n}: probability that n is not selected.
  double survival(std::int64_t n) const { return survival_[static_cast<std::size_t>(n - 1)]; }
  /// 1 - e^{-w_n}, computed with expm1.
  double inclusion(std::int64_t n) const;

  std::span<const double> values() const noexcept { return values_; }

 private:
  WeightSequence(WeightKind kind, std::vector<double> values);

  WeightKind kind_;
  std::vector<double> values_;
  std::vector<double> survival_;
};

/// Closed-form w_n for a kind (table kinds index their list).
double weight_formula(const WeightKind& kind, std::int64_t n);

std::vector<double> bernoulli_params(const WeightSequence& w);

enum class Regime { sidon, analyticity, irregular };
std::string regime_name(Regime regime);

struct RegimeOptions {
  /// First index of the tail window; 0 selects N/2.
  std::int64_t tail_start = 0;
  /// Upper bound on n*w_n for the Sidon regime; unset selects 10 * median(n*w_n) over the window.
  std::optional<double> bound;
  /// Minimal relative increase of consecutive block minima of n*w_n.
  double growth_threshold = 1e-4;
  /// Block boundaries inside the window; empty selects 5 geometric points.
  std::vector<std::int64_t> checkpoints;
};

struct RegimeReport {
  double limsup_estimate = 0.0;  ///< max of n*w_n over the window
  double liminf_estimate = 0.0;  ///< min of n*w_n over the window
  double bound = 0.0;
  std::vector<double> block_minima;
  Regime verdict = Regime::irregular;
};

/// Heuristic regime label from a finite tail window.
///
/// analyticity when the block minima of n*w_n strictly grow (by the growth
/// threshold) across the checkpoints; otherwise sidon when the window maximum
/// stays under the bound; otherwise irregular.
RegimeReport classify_regime(const WeightSequence& w, const RegimeOptions& options = {});

/// (theta * w, (1 - theta) * w), theta in (0, 1).
std::pair<WeightSequence, WeightSequence> split(const WeightSequence& w, double theta);

}  // namespace bohrlab
